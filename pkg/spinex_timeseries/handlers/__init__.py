from jupyter_server.utils import url_path_join
from jupyter_server.serverapp import ServerWebApplication

from ..configurations import Configuration
from .diagnostics import AnomaliesHandler, ExplainHandler
from .forecast import ForecastHandler
from .synthetic import FunctionsHandler, GenerateHandler


def setup_handlers(web_app: ServerWebApplication, configuration: Configuration):
    base_url = url_path_join(web_app.settings["base_url"], "spinex")
    web_app.add_handlers(".*$", [
        (url_path_join(base_url, "functions"), FunctionsHandler, dict(configuration=configuration)),
        (url_path_join(base_url, "generate"),  GenerateHandler,  dict(configuration=configuration)),
        (url_path_join(base_url, "forecast"),  ForecastHandler,  dict(configuration=configuration)),
        (url_path_join(base_url, "anomalies"), AnomaliesHandler, dict(configuration=configuration)),
        (url_path_join(base_url, "explain"),   ExplainHandler,   dict(configuration=configuration)),
    ])
