# -*- coding: UTF-8 -*-
import logging
import traceback

from django.http import JsonResponse
from django.utils.deprecation import MiddlewareMixin

from ultra.exceptions import BudgetExceeded, UltraError

logger = logging.getLogger("default")


class ExceptionLoggingMiddleware(MiddlewareMixin):
    def process_exception(self, request, exception):
        if isinstance(exception, UltraError):
            # 结构不合法或超预算属于可预期的错误, 直接返回诊断
            status = 422 if isinstance(exception, BudgetExceeded) else 400
            logger.warning(f"{request.path} 计算失败:{exception.to_dict()}")
            return JsonResponse({"errors": exception.to_dict()}, status=status)
        logger.error(traceback.format_exc())
