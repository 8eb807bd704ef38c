# -*- coding: UTF-8 -*-
from django.db import models

JOB_KIND_CHOICES = (
    ("ramsey-check", "Ramsey 检查"),
    ("ramsey-search", "Ramsey 搜索"),
    ("expansion-check", "扩张性质检查"),
)

JOB_STATUS_CHOICES = (
    ("queued", "排队中"),
    ("running", "执行中"),
    ("finished", "已完成"),
    ("exception", "执行异常"),
)

VERDICT_CHOICES = (
    ("", "无"),
    ("holds", "成立"),
    ("counterexample", "有反例"),
    ("inconclusive", "预算内无结论"),
)


class Config(models.Model):
    """
    配置信息表, 预算类配置按 settings 中的名字存放
    """

    item = models.CharField("配置项", max_length=100, unique=True)
    value = models.CharField("配置项值", max_length=500)
    description = models.CharField("描述", max_length=200, default="", blank=True)

    class Meta:
        managed = True
        db_table = "ultra_config"
        verbose_name = "系统配置"
        verbose_name_plural = "系统配置"


class VerificationJob(models.Model):
    """
    后台验证任务, payload 与 result 为 JSON
    """

    kind = models.CharField("任务类型", max_length=30, choices=JOB_KIND_CHOICES)
    payload = models.JSONField("任务参数")
    status = models.CharField(
        "状态", max_length=20, choices=JOB_STATUS_CHOICES, default="queued"
    )
    verdict = models.CharField(
        "结论", max_length=20, choices=VERDICT_CHOICES, default="", blank=True
    )
    result = models.JSONField("结果", null=True, blank=True)
    cost = models.FloatField("耗时(秒)", default=0)
    task_id = models.CharField("异步任务ID", max_length=50, default="", blank=True)
    create_time = models.DateTimeField("创建时间", auto_now_add=True)
    finish_time = models.DateTimeField("结束时间", null=True, blank=True)

    def __str__(self):
        return f"{self.kind}#{self.id}"

    class Meta:
        managed = True
        db_table = "ultra_verification_job"
        verbose_name = "验证任务"
        verbose_name_plural = "验证任务"
