# -*- coding:utf-8 -*-
import datetime
import logging
import traceback

from django.db import close_old_connections, connection, transaction
from django_q.tasks import async_task

from common.config import SysConfig
from common.utils.const import Const, JobDict
from ultra.harness import get_family
from ultra.harness.expansion import expansion_check, expansion_search
from ultra.harness.ramsey import ramsey_check, ramsey_search
from ultra.kstruct import params_from_dict
from ultra.models import VerificationJob
from ultra.utils.codec import lattice_of, ordered_of, space_of, structure_of, to_plain

logger = logging.getLogger("default")


def _family(payload):
    lattice = lattice_of(payload)
    params = params_from_dict(lattice, payload["params"]) if payload.get("params") else None
    sys_config = SysConfig()
    budget = payload.get("budget") or sys_config.get_int("ENUMERATE_BUDGET")
    return get_family(payload.get("family", "ordered"), lattice, params=params, budget=budget)


def run_problem(kind, payload):
    """
    执行一个验证问题, 返回 Verdict
    ramsey 类 payload: {"family", "lattice", "A", "B", "C"|"size", "r"}
    expansion 类 payload: {"lattice", "A": 有序空间, "B": 空间} 或不给 B 时做搜索
    """
    sys_config = SysConfig()
    copy_limit = sys_config.get_int("RAMSEY_COPY_LIMIT")
    coloring_budget = sys_config.get_int("RAMSEY_COLORING_BUDGET")
    if kind in ("ramsey-check", "ramsey-search"):
        family = _family(payload)
        a = structure_of(family, payload["A"])
        b = structure_of(family, payload["B"])
        r = int(payload.get("r", 2))
        if kind == "ramsey-check":
            c = structure_of(family, payload["C"])
            return ramsey_check(family, a, b, r, c, copy_limit, coloring_budget)
        c, verdict = ramsey_search(
            family, a, b, r, int(payload["size"]), copy_limit, coloring_budget
        )
        verdict.witness = c if c is not None else verdict.witness
        return verdict
    if kind == "expansion-check":
        lattice = lattice_of(payload)
        a = ordered_of(payload["A"], lattice)
        if payload.get("B") is not None:
            return expansion_check(a, space_of(payload["B"], lattice), report=True)
        size = payload.get("size") or sys_config.get_int("EXPANSION_SEARCH_SIZE")
        return expansion_search(a, lattice, a.language, int(size), payload.get("budget"))
    raise ValueError(f"未知的任务类型:{kind}")


def verdict_name(verdict):
    if verdict.inconclusive:
        return JobDict.verdict["inconclusive"]
    return JobDict.verdict["holds" if verdict.holds else "counterexample"]


def submit_verification(job):
    """把验证任务放入 django-q 队列"""
    task_id = async_task(
        "ultra.utils.tasks.run_verification",
        job.id,
        hook="ultra.utils.tasks.run_verification_callback",
        timeout=-1,
        task_name=f"{Const.jobPrefix[job.kind]}-{job.id}",
    )
    VerificationJob.objects.filter(id=job.id).update(task_id=task_id or "")
    logger.debug(f"验证任务{job.id}已入队, task_id:{task_id}")
    return task_id


def run_verification(job_id):
    """为异步任务准备的执行入口, 返回可以存库的结果"""
    with transaction.atomic():
        job = VerificationJob.objects.select_for_update().get(id=job_id)
        if job.status != JobDict.job_status["queued"]:
            raise Exception(f"任务{job_id}状态不正确，禁止重复执行！")
        VerificationJob(id=job_id, status=JobDict.job_status["running"]).save(update_fields=["status"])
    verdict = run_problem(job.kind, job.payload)
    return {"verdict": verdict_name(verdict), "cost": verdict.cost, **to_plain(verdict.to_dict())}


def run_verification_callback(task):
    """异步任务的回调, 使用django-q的hook, 传入参数为整个task, task.result 是真正的结果"""
    if connection.connection and not connection.is_usable():
        close_old_connections()
    job_id = task.args[0]
    job = VerificationJob.objects.get(id=job_id)
    job.finish_time = task.stopped or datetime.datetime.now()
    try:
        if not task.success:
            # 不成功会返回错误堆栈信息
            job.status = JobDict.job_status["exception"]
            job.result = {"error": str(task.result)}
        else:
            job.status = JobDict.job_status["finished"]
            job.verdict = task.result["verdict"]
            job.cost = task.result.get("cost") or 0
            job.result = task.result
        job.save()
    except Exception:
        logger.error(f"验证任务回调异常: {job_id} {traceback.format_exc()}")
        VerificationJob.objects.filter(id=job_id).update(
            finish_time=job.finish_time, status=JobDict.job_status["exception"]
        )
