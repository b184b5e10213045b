from importlib.metadata import PackageNotFoundError, version

from jupyter_server.serverapp import ServerApp

try:
    __version__ = version("spinex_timeseries")
except PackageNotFoundError:
    # source checkout on sys.path without an install
    __version__ = "dev"

from .configurations import load_configuration
from .handlers import setup_handlers
from .model import Model


def _jupyter_server_extension_points():
    return [{
        "module": "spinex_timeseries"
    }]


def _load_jupyter_server_extension(server_app: ServerApp):
    configuration = load_configuration(logger=server_app.log)
    setup_handlers(server_app.web_app, configuration)

    name = "spinex_timeseries"
    server_app.log.info(f"Registered {name} server extension")
