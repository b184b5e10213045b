from typing import Callable

from jupyter_server.base.handlers import APIHandler
from tornado.ioloop import IOLoop
from tornado.web import HTTPError, authenticated

from ..configurations import Configuration
from ..core import dumps_report
from ..errors import DataError, SpinexError
from ..model import Model
from ..types import *


class SpinexHandler(APIHandler):
    _configuration: Configuration

    def initialize(self, configuration):
        self._configuration = configuration

    async def run_blocking(self, function: Callable, *args):
        """ Run engine work on the default executor so the server loop stays responsive """
        return await IOLoop.current().run_in_executor(None, function, *args)

    async def fail(self, e: Exception):
        """ Answer with the error message: 400 for bad input, 500 for anything unexpected """
        self.log.error(str(e))
        if isinstance(e, HTTPError):
            self.set_status(e.status_code)
        else:
            self.set_status(400 if isinstance(e, (SpinexError, ValueError, TypeError)) else 500)
        await self.finish(str(e))


class EngineHandler(SpinexHandler):
    """ Base for handlers that run the engine on a series posted in the request body """

    def build_model(self, body: dict) -> Model:
        if not isinstance(body, dict) or "values" not in body:
            raise DataError("Request body must contain 'values'")

        return Model(
            TimeSeries(body["values"]),
            configuration=self._configuration,
            logger=self.log,
            seed=int(body.get("seed", 0)),
            window_size=body.get("window"),
            forecast_horizon=body.get("horizon"),
            similarity_methods=body.get("methods"),
            dynamic_window=body.get("dynamic_window"),
            multi_level=body.get("multi_level"),
            dynamic_threshold=body.get("dynamic_threshold"),
        )

    async def report(self, body: dict, build_report: Callable[[Model], Report]) -> Report:
        """ Build the model and its report off the event loop """
        return await self.run_blocking(lambda: build_report(self.build_model(body)))

    async def respond(self, report: Report):
        self.set_status(200)
        await self.finish(dumps_report(report))


class ForecastHandler(EngineHandler):
    @authenticated
    async def post(self):
        try:
            report = await self.report(self.get_json_body(), Model.forecast_report)
            await self.respond(report)

        except Exception as e:
            await self.fail(e)
