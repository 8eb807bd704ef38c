# -*- coding: UTF-8 -*-
"""命令行, 接口与后台任务共用的 JSON 读写"""
import sys

import simplejson as json

from common.utils.extend_json_encoder import ExtendJSONEncoder
from ultra.exceptions import InvalidStructure
from ultra.lattice import (
    boolean_lattice,
    boolean_square,
    chain_lattice,
    diamond,
    lattice_from_dict,
    pentagon,
)
from ultra.space import space_from_dict
from ultra.sqo import language_from_dict, min_language, ordered_space_from_dict


def named_lattice(name):
    """CH<n>, B2, B<k>, M3, N5"""
    name = str(name).upper()
    if name.startswith("CH") and name[2:].isdigit():
        return chain_lattice(int(name[2:]))
    if name == "B2":
        return boolean_square()
    if name.startswith("B") and name[1:].isdigit():
        return boolean_lattice(int(name[1:]))
    if name == "M3":
        return diamond()
    if name == "N5":
        return pentagon()
    raise InvalidStructure(f"未知的格名称:{name}")


def lattice_of(data):
    """lattice 字段可以是格的 JSON, 也可以是 CH3 这样的名字"""
    value = data.get("lattice") if isinstance(data, dict) else data
    if value is None:
        raise InvalidStructure("缺少 lattice 字段")
    if isinstance(value, str):
        return named_lattice(value)
    return lattice_from_dict(value)


def load(path):
    """path 为 - 时读标准输入"""
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidStructure(f"读取JSON失败:{e}")


def dumps(obj):
    return json.dumps(obj, cls=ExtendJSONEncoder, ensure_ascii=False, indent=2)


def to_plain(obj):
    """转成只含基本类型的对象, 用于存库"""
    return json.loads(json.dumps(obj, cls=ExtendJSONEncoder))


def space_of(data, lattice):
    return space_from_dict(data.get("space", data), lattice)


def language_of(data, lattice):
    if data.get("language"):
        return language_from_dict(lattice, data["language"])
    return min_language(lattice)


def ordered_of(data, lattice):
    """{"space": ..., "language": ..., "orders": [...]}"""
    space = space_of(data, lattice)
    return ordered_space_from_dict(space, language_of(data, lattice), data.get("orders", []))


def structure_of(family, value):
    """结构可以直接给 JSON, 也可以给整数 n 表示该族 n 元结构中的第一个"""
    if isinstance(value, int):
        found = family.enumerate(value)
        if not found:
            raise InvalidStructure(f"{family.name} 族没有 {value} 元结构")
        return found[0]
    return family.from_dict(value)
