from django.http import Http404
from drf_spectacular.utils import extend_schema
from rest_framework import generics, serializers, status, views
from rest_framework.response import Response

from ultra.exceptions import UltraError
from ultra.models import VerificationJob
from ultra.transfer import lift
from ultra.utils.codec import to_plain
from ultra.utils.tasks import submit_verification
from .filters import VerificationJobFilter
from .pagination import CustomizedPagination
from .serializers import (
    LatticeCheckResultSerializer,
    LatticeCheckSerializer,
    LiftSerializer,
    SpaceCheckSerializer,
    VerificationJobSerializer,
)
import logging

logger = logging.getLogger("default")


class LatticeCheck(views.APIView):
    @extend_schema(
        summary="格检查",
        request=LatticeCheckSerializer,
        responses={200: LatticeCheckResultSerializer},
        description="校验格, 并给出是否分配, M3/N5 子格与 meet-irreducible 元素",
    )
    def post(self, request):
        serializer = LatticeCheckSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        result = serializer.get_result()
        return Response(LatticeCheckResultSerializer(result).data)


class SpaceCheck(views.APIView):
    @extend_schema(
        summary="空间检查",
        request=SpaceCheckSerializer,
        responses={200: None},
        description="校验 Λ-超度量空间, 返回规范化的距离表和各层等价类",
    )
    def post(self, request):
        serializer = SpaceCheckSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        return Response(to_plain(serializer.get_result()))


class Lift(views.APIView):
    @extend_schema(
        summary="提升",
        request=LiftSerializer,
        responses={200: None},
        description="计算有序空间的 lift, 返回 K 结构的 JSON",
    )
    def post(self, request):
        serializer = LiftSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        try:
            structure = lift(
                serializer.validated_data["ordered"],
                serializer.validated_data["lift_params"],
            )
        except UltraError as e:
            raise serializers.ValidationError({"errors": e.to_dict()})
        return Response(to_plain(structure))


class JobList(generics.ListAPIView):
    """
    列出验证任务或者提交一个新的验证任务
    """

    filterset_class = VerificationJobFilter
    pagination_class = CustomizedPagination
    serializer_class = VerificationJobSerializer
    queryset = VerificationJob.objects.all().order_by("-id")

    @extend_schema(
        summary="验证任务清单",
        request=VerificationJobSerializer,
        responses={200: VerificationJobSerializer},
        description="列出所有验证任务（过滤，分页）",
    )
    def get(self, request):
        jobs = self.filter_queryset(self.queryset)
        page_jobs = self.paginate_queryset(queryset=jobs)
        serializer_obj = self.get_serializer(page_jobs, many=True)
        data = {"data": serializer_obj.data}
        return self.get_paginated_response(data)

    @extend_schema(
        summary="提交验证任务",
        request=VerificationJobSerializer,
        responses={201: VerificationJobSerializer},
        description="提交 ramsey-check / ramsey-search / expansion-check, 放入后台队列执行",
    )
    def post(self, request):
        serializer = VerificationJobSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        job = serializer.save()
        submit_verification(job)
        job.refresh_from_db()
        return Response(
            VerificationJobSerializer(job).data, status=status.HTTP_201_CREATED
        )


class JobDetail(views.APIView):
    """
    验证任务详情
    """

    serializer_class = VerificationJobSerializer

    def get_object(self, pk):
        try:
            return VerificationJob.objects.get(pk=pk)
        except VerificationJob.DoesNotExist:
            raise Http404

    @extend_schema(
        summary="验证任务详情",
        responses={200: VerificationJobSerializer},
        description="查看一个验证任务的状态与结论",
    )
    def get(self, request, pk):
        job = self.get_object(pk)
        return Response(VerificationJobSerializer(job).data)
