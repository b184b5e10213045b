from tornado.web import authenticated

from .forecast import EngineHandler


class AnomaliesHandler(EngineHandler):
    @authenticated
    async def post(self):
        try:
            body = self.get_json_body()
            percentile = body.get("percentile") if isinstance(body, dict) else None
            percentile = None if percentile is None else float(percentile)
            self.log.info(f"Detecting anomalies below percentile {percentile!r}")
            await self.respond(await self.report(body, lambda model: model.anomalies_report(percentile)))

        except Exception as e:
            await self.fail(e)


class ExplainHandler(EngineHandler):
    @authenticated
    async def post(self):
        try:
            body = self.get_json_body()
            k = body.get("k") if isinstance(body, dict) else None
            k = None if k is None else int(k)
            await self.respond(await self.report(body, lambda model: model.explain_report(k)))

        except Exception as e:
            await self.fail(e)
