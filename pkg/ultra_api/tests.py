from unittest.mock import patch

from rest_framework import status
from rest_framework.test import APITestCase

from common.config import SysConfig
from ultra.models import VerificationJob


class TestLatticeCheck(APITestCase):
    """测试格检查接口"""

    def test_named_chain(self):
        r = self.client.post("/api/v1/lattice/check/", {"lattice": "CH3"}, format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertTrue(r.json()["distributive"])
        self.assertIsNone(r.json()["forbidden"])
        self.assertListEqual(r.json()["meet_irreducibles"], ["0", "e"])

    def test_pentagon_not_distributive(self):
        r = self.client.post("/api/v1/lattice/check/", {"lattice": "N5"}, format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertFalse(r.json()["distributive"])
        self.assertEqual(r.json()["forbidden"][0], "N5")

    def test_missing_meet(self):
        lattice = {"elements": ["0", "a", "b", "c", "d"], "leq": [["0", "a"], ["0", "b"], ["a", "c"], ["b", "c"], ["a", "d"], ["b", "d"]]}
        r = self.client.post("/api/v1/lattice/check/", {"lattice": lattice}, format="json")
        self.assertEqual(r.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(r.json()["lattice"]["errors"]["error"], "JoinMissing")


class TestSpaceCheck(APITestCase):
    """测试空间检查接口"""

    def test_valid_space(self):
        json_data = {
            "lattice": "CH3",
            "points": ["x", "y", "z"],
            "d": {"x,y": "e", "x,z": "1", "y,z": "1"},
        }
        r = self.client.post("/api/v1/space/check/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertListEqual(r.json()["classes"]["e"], [["x", "y"], ["z"]])

    def test_triangle_violation(self):
        json_data = {
            "lattice": "CH3",
            "points": ["x", "y", "z"],
            "d": {"x,y": "e", "x,z": "e", "y,z": "1"},
        }
        r = self.client.post("/api/v1/space/check/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(r.json()["errors"]["error"], "TriangleViolation")


class TestLift(APITestCase):
    """测试提升接口"""

    def test_lift_two_points(self):
        json_data = {
            "lattice": "CH2",
            "space": {"points": ["x", "y"], "d": {"x,y": "1"}},
            "orders": [{"bottom": "0", "top": "1", "pairs": [[["x"], ["y"]]]}],
        }
        r = self.client.post("/api/v1/lift/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        # 两个点类加一个 1-类
        self.assertEqual(len(r.json()["sorts"]), 3)
        self.assertListEqual(r.json()["less"], ["0[x]", "0[y]", "1[x|y]"])

    def test_lift_reversed_order(self):
        json_data = {
            "lattice": "CH2",
            "space": {"points": ["x", "y"], "d": {"x,y": "1"}},
            "orders": [{"bottom": "0", "top": "1", "pairs": [[["y"], ["x"]]]}],
        }
        r = self.client.post("/api/v1/lift/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertListEqual(r.json()["less"], ["0[y]", "0[x]", "1[x|y]"])

    def test_missing_order(self):
        json_data = {
            "lattice": "CH2",
            "space": {"points": ["x", "y"], "d": {"x,y": "1"}},
        }
        r = self.client.post("/api/v1/lift/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_400_BAD_REQUEST)


class TestVerificationJob(APITestCase):
    """测试验证任务接口"""

    def setUp(self):
        self.job = VerificationJob.objects.create(
            kind="ramsey-check",
            payload={"family": "ordered", "lattice": "CH2", "A": 1, "B": 2, "C": 3},
        )

    def tearDown(self):
        VerificationJob.objects.all().delete()
        SysConfig().purge()

    def test_get_job_list(self):
        r = self.client.get("/api/v1/job/", format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertEqual(r.json()["count"], 1)

    def test_filter_job_list(self):
        r = self.client.get("/api/v1/job/?status=finished", format="json")
        self.assertEqual(r.json()["count"], 0)
        r = self.client.get("/api/v1/job/?kind=ramsey-check", format="json")
        self.assertEqual(r.json()["count"], 1)

    @patch("ultra.utils.tasks.async_task")
    def test_create_job(self, _async_task):
        _async_task.return_value = "task-1"
        json_data = {
            "kind": "ramsey-search",
            "payload": {"family": "ordered", "lattice": "CH2", "A": 1, "B": 2, "size": 4},
        }
        r = self.client.post("/api/v1/job/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_201_CREATED)
        self.assertEqual(r.json()["status"], "queued")
        self.assertEqual(r.json()["task_id"], "task-1")
        _async_task.assert_called_once()
        self.assertEqual(
            _async_task.call_args.kwargs["hook"],
            "ultra.utils.tasks.run_verification_callback",
        )

    def test_create_job_missing_field(self):
        json_data = {"kind": "ramsey-check", "payload": {"lattice": "CH2", "A": 1}}
        r = self.client.post("/api/v1/job/", json_data, format="json")
        self.assertEqual(r.status_code, status.HTTP_400_BAD_REQUEST)

    def test_get_job_detail(self):
        r = self.client.get(f"/api/v1/job/{self.job.id}/", format="json")
        self.assertEqual(r.status_code, status.HTTP_200_OK)
        self.assertEqual(r.json()["kind"], "ramsey-check")

    def test_get_job_not_found(self):
        r = self.client.get("/api/v1/job/9999/", format="json")
        self.assertEqual(r.status_code, status.HTTP_404_NOT_FOUND)
