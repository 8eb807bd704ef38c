# -*- coding: UTF-8 -*-


class Const(object):
    # 后台任务id的前缀
    jobPrefix = {
        "ramsey-check": "ramsey",
        "ramsey-search": "ramsey",
        "expansion-check": "expansion",
    }


class JobDict:
    # 验证任务类型
    job_kind = {
        "ramsey_check": "ramsey-check",
        "ramsey_check_display": "Ramsey 检查",
        "ramsey_search": "ramsey-search",
        "ramsey_search_display": "Ramsey 搜索",
        "expansion_check": "expansion-check",
        "expansion_check_display": "扩张性质检查",
    }

    # 任务状态
    job_status = {
        "queued": "queued",
        "queued_display": "排队中",
        "running": "running",
        "running_display": "执行中",
        "finished": "finished",
        "finished_display": "已完成",
        "exception": "exception",
        "exception_display": "执行异常",
    }

    # 结论
    verdict = {
        "holds": "holds",
        "holds_display": "成立",
        "counterexample": "counterexample",
        "counterexample_display": "有反例",
        "inconclusive": "inconclusive",
        "inconclusive_display": "预算内无结论",
    }


# 命令行退出码
EXIT_HOLDS = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_BUDGET = 2
