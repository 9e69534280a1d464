from django.apps import AppConfig


class ExceptionalSetsConfig(AppConfig):
    name = "exceptional_sets"
    verbose_name = "Exceptional sets lab"
