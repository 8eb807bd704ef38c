import datetime
import simplejson as json
import time
from decimal import Decimal

from django.test import RequestFactory, TestCase, override_settings

from common.config import SysConfig
from common.middleware.exception_logging_middleware import ExceptionLoggingMiddleware
from common.utils.extend_json_encoder import ExtendJSONEncoder, tuple_keys
from common.utils.timer import FuncTimer
from ultra.exceptions import SaturationBudgetExceeded, TriangleViolation
from ultra.lattice import chain_lattice


class ConfigOpsTests(TestCase):
    def tearDown(self):
        SysConfig().purge()

    def test_purge(self):
        sys_config = SysConfig()
        sys_config.set("some_key", "some_value")
        sys_config.purge()
        self.assertEqual({}, sys_config.sys_config)
        sys_config2 = SysConfig()
        self.assertEqual({}, sys_config2.sys_config)

    def test_replace_configs(self):
        sys_config = SysConfig()
        new_config = json.dumps(
            [
                {"key": "ramsey_copy_limit", "value": 20},
                {"key": "strconfig", "value": "strconfig"},
                {"key": "boolconfig", "value": "false"},
            ]
        )
        result = sys_config.replace(new_config)
        self.assertEqual(result["status"], 0)
        expected_config = {
            "ramsey_copy_limit": "20",
            "strconfig": "strconfig",
            "boolconfig": False,
        }
        self.assertEqual(expected_config, sys_config.sys_config)

    def test_get_bool_transform(self):
        bool_config = json.dumps([{"key": "boolconfig2", "value": "false"}])
        sys_config = SysConfig()
        sys_config.replace(bool_config)
        self.assertEqual(sys_config.sys_config["boolconfig2"], False)

    def test_set_bool_transform(self):
        sys_config = SysConfig()
        sys_config.set("boolconfig3", False)
        self.assertEqual(SysConfig().get("boolconfig3"), False)

    def test_get_other_data(self):
        new_config = json.dumps([{"key": "other_config", "value": "testvalue"}])
        sys_config = SysConfig()
        sys_config.replace(new_config)
        self.assertEqual(sys_config.get("other_config"), "testvalue")
        self.assertEqual(sys_config.get("missing", "default"), "default")

    def test_blank_value(self):
        sys_config = SysConfig()
        sys_config.set("blank", "  ")
        self.assertEqual(sys_config.get("blank", "x"), "x")

    @override_settings(RAMSEY_COPY_LIMIT=24)
    def test_get_int(self):
        sys_config = SysConfig()
        self.assertEqual(sys_config.get_int("ramsey_copy_limit"), 24)
        sys_config.set("ramsey_copy_limit", "12")
        self.assertEqual(SysConfig().get_int("ramsey_copy_limit"), 12)
        sys_config.set("ramsey_copy_limit", "many")
        self.assertEqual(SysConfig().get_int("ramsey_copy_limit"), 24)


class ExtendJSONEncoderTests(TestCase):
    def dumps(self, obj):
        return json.loads(json.dumps(obj, cls=ExtendJSONEncoder))

    def test_sets(self):
        self.assertEqual(self.dumps({"a": {"y", "x"}}), {"a": ["x", "y"]})
        self.assertEqual(self.dumps(frozenset([2, 1])), [1, 2])

    def test_datetime(self):
        self.assertEqual(
            self.dumps(datetime.datetime(2022, 1, 2, 3, 4, 5)), "2022-01-02 03:04:05"
        )
        self.assertEqual(self.dumps(datetime.date(2022, 1, 2)), "2022-01-02")
        self.assertEqual(self.dumps(Decimal("1.5")), "1.5")

    def test_to_dict(self):
        data = self.dumps(chain_lattice(2))
        self.assertListEqual(data["elements"], ["0", "1"])

    def test_tuple_keys(self):
        self.assertEqual(tuple_keys({("x", "y"): "e", "z": 1}), {"x,y": "e", "z": 1})


class FuncTimerTests(TestCase):
    def test_cost(self):
        with FuncTimer() as t:
            time.sleep(0.01)
            self.assertGreater(t.elapsed(), 0)
        self.assertGreaterEqual(t.cost, 0.01)


class ExceptionLoggingMiddlewareTests(TestCase):
    def setUp(self):
        self.middleware = ExceptionLoggingMiddleware(lambda request: None)
        self.request = RequestFactory().post("/api/v1/lift/")

    def test_structure_error(self):
        r = self.middleware.process_exception(
            self.request, TriangleViolation("违反超度量三角不等式", x="a")
        )
        self.assertEqual(r.status_code, 400)
        self.assertEqual(json.loads(r.content)["errors"]["error"], "TriangleViolation")
        self.assertEqual(json.loads(r.content)["errors"]["x"], "a")

    def test_budget(self):
        r = self.middleware.process_exception(
            self.request, SaturationBudgetExceeded("超过预算", budget=1)
        )
        self.assertEqual(r.status_code, 422)

    def test_other_exception(self):
        self.assertIsNone(self.middleware.process_exception(self.request, ValueError("x")))
