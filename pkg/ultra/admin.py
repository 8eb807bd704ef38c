# -*- coding: UTF-8 -*-
from django.contrib import admin

from .models import Config, VerificationJob


# 系统配置
@admin.register(Config)
class ConfigAdmin(admin.ModelAdmin):
    list_display = ("item", "value", "description")
    search_fields = ("item",)


# 验证任务
@admin.register(VerificationJob)
class VerificationJobAdmin(admin.ModelAdmin):
    list_display = (
        "id",
        "kind",
        "status",
        "verdict",
        "cost",
        "create_time",
        "finish_time",
    )
    search_fields = ("id", "kind")
    list_filter = ("kind", "status", "verdict")
    readonly_fields = ("create_time", "finish_time", "result", "cost")
