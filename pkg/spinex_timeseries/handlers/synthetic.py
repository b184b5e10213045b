import json
from tornado.web import authenticated

from ..bench.synthetic import CATALOGUE, generate_synthetic
from ..core import to_jsonable
from ..errors import DataError
from ..types import *
from .forecast import SpinexHandler


class FunctionsHandler(SpinexHandler):
    @authenticated
    async def get(self):
        await self.finish(json.dumps([
            function.dump() for function in CATALOGUE.values()
        ]))


class GenerateHandler(SpinexHandler):
    @authenticated
    async def post(self):
        try:
            body = self.get_json_body()
            if not isinstance(body, dict) or "function" not in body:
                raise DataError("Request body must contain 'function'")

            spec = SyntheticSpec(
                function_id=body["function"],
                n_points=int(body.get("n_points", 200)),
                t_max=float(body.get("t_max", 10.0)),
                noise_sigma=body.get("sigma"),
                seed=int(body.get("seed", 0)),
            )
            self.log.info(f"Generating synthetic series {spec.name!r}")
            series = await self.run_blocking(generate_synthetic, spec)
            self.set_status(200)
            await self.finish(json.dumps({"name": spec.name, "values": to_jsonable(series.values)}))

        except Exception as e:
            await self.fail(e)
