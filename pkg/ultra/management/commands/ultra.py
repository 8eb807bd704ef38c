# -*- coding: UTF-8 -*-
"""
命令行入口: python manage.py ultra <group> [<action>] --json PATH
输入为 JSON, 结果以 JSON 打印到标准输出
退出码: 0 成立/合法, 1 反例/不合法, 2 超出预算
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from common.utils.const import EXIT_BUDGET, EXIT_COUNTEREXAMPLE, EXIT_HOLDS
from ultra import engine, eqlift, kstruct, lattice as lat, sqo, transfer
from ultra.exceptions import BudgetExceeded, UltraError
from ultra.harness import enumerate_structures
from ultra.harness.gadgets import gadget_pi, order_reversal
from ultra.kstruct import default_params, k_from_dict, params_from_dict
from ultra.space import amalgamate_spaces, space_from_dict
from ultra.utils import codec
from ultra.utils.tasks import run_problem

logger = logging.getLogger("default")

# group -> 可选的 action
GROUPS = {
    "lattice": ["check", "dot"],
    "space": ["check", "amalgamate"],
    "sqo": ["compose", "restrict", "derive", "linearize"],
    "k0": ["close"],
    "kstruct": ["check", "reinterpret"],
    "lift": [],
    "represent": [],
    "kernel": [],
    "amalgamate": [],
    "complete": [],
    "enumerate": [],
    "ramsey-check": [],
    "ramsey-search": [],
    "expansion-check": [],
    "gadget": [],
    "reverse": [],
}


def _params(data, lattice):
    if data.get("params"):
        return params_from_dict(lattice, data["params"])
    return default_params(lattice)


def _mapping(value):
    return {str(k): str(v) for k, v in (value or {}).items()}


class Command(BaseCommand):
    help = "Λ-超度量空间的 Ramsey 扩张工具"

    def add_arguments(self, parser):
        parser.add_argument("group", choices=sorted(GROUPS))
        parser.add_argument("action", nargs="?", default=None)
        parser.add_argument("--json", dest="path", default="-", help="输入JSON文件, 默认标准输入")
        parser.add_argument("--budget", type=int, default=None, help="枚举/饱和预算")

    def handle(self, *args, **options):
        group, action = options["group"], options["action"]
        actions = GROUPS[group]
        if actions and action not in actions:
            raise CommandError(f"{group} 的 action 只能是 {'|'.join(actions)}")
        data = codec.load(options["path"])
        handler = getattr(self, "do_" + "_".join([group.replace("-", "_")] + ([action] if actions else [])))
        try:
            output, code = handler(data, options["budget"])
        except BudgetExceeded as e:
            logger.warning(f"ultra {group} 超出预算:{e.to_dict()}")
            self.stdout.write(codec.dumps({"errors": e.to_dict()}))
            raise CommandError(e.msg, returncode=EXIT_BUDGET)
        except UltraError as e:
            self.stdout.write(codec.dumps({"errors": e.to_dict()}))
            raise CommandError(e.msg, returncode=EXIT_COUNTEREXAMPLE)
        self.stdout.write(output if isinstance(output, str) else codec.dumps(output))
        if code != EXIT_HOLDS:
            raise CommandError(f"ultra {group} 未通过", returncode=code)

    # 格
    def do_lattice_check(self, data, budget):
        lattice = codec.lattice_of(data) if "lattice" in data else lat.lattice_from_dict(data)
        forbidden = lat.find_forbidden_sublattice(lattice)
        distributive = lat.is_distributive(lattice)
        output = {
            "lattice": lattice.to_dict(),
            "distributive": distributive,
            "forbidden": list(forbidden) if forbidden else None,
            "meet_irreducibles": lat.meet_irreducibles(lattice),
        }
        return output, EXIT_HOLDS if distributive else EXIT_COUNTEREXAMPLE

    def do_lattice_dot(self, data, budget):
        lattice = codec.lattice_of(data) if "lattice" in data else lat.lattice_from_dict(data)
        return lat.to_dot(lattice), EXIT_HOLDS

    # 空间
    def do_space_check(self, data, budget):
        space = space_from_dict(data, codec.lattice_of(data))
        output = {
            **space.to_dict(),
            "classes": {lam: space.classes(lam) for lam in space.lattice.elements},
        }
        return output, EXIT_HOLDS

    def do_space_amalgamate(self, data, budget):
        lattice = codec.lattice_of(data)
        amalgam = amalgamate_spaces(
            codec.space_of(data["base"], lattice),
            codec.space_of(data["A1"], lattice),
            _mapping(data.get("f1")),
            codec.space_of(data["A2"], lattice),
            _mapping(data.get("f2")),
        )
        output = {
            "space": amalgam.space.to_dict(),
            "left": amalgam.left,
            "right": amalgam.right,
            "strong": amalgam.is_strong,
        }
        return output, EXIT_HOLDS

    # 子商序
    def do_sqo_compose(self, data, budget):
        lattice = codec.lattice_of(data)
        space = codec.space_of(data["space"], lattice)
        outer = sqo.sqo_from_dict(space, data["outer"])
        inner = sqo.sqo_from_dict(space, data["inner"])
        return sqo.compose(outer, inner).to_dict(), EXIT_HOLDS

    def do_sqo_restrict(self, data, budget):
        lattice = codec.lattice_of(data)
        space = codec.space_of(data["space"], lattice)
        order = sqo.sqo_from_dict(space, data["order"])
        return sqo.restrict(order, str(data["g"])).to_dict(), EXIT_HOLDS

    def _choice(self, data, lattice):
        return sqo.DerivationChoice(lattice, data.get("cover"), data.get("partner"))

    def do_sqo_derive(self, data, budget):
        lattice = codec.lattice_of(data)
        ordered = codec.ordered_of(data, lattice)
        order = sqo.derive_definable(
            ordered, str(data["E"]), str(data["F"]), self._choice(data, lattice)
        )
        return order.to_dict(), EXIT_HOLDS

    def do_sqo_linearize(self, data, budget):
        lattice = codec.lattice_of(data)
        ordered = codec.ordered_of(data, lattice)
        return sqo.linearize(ordered, self._choice(data, lattice)), EXIT_HOLDS

    # K0 与 K
    def do_k0_close(self, data, budget):
        k = eqlift.k0_from_dict(data, codec.lattice_of(data))
        closed = eqlift.cl0(k, budget)
        return {**closed.to_dict(), "added": len(closed) - len(k)}, EXIT_HOLDS

    def _structure(self, data, key="structure"):
        lattice = codec.lattice_of(data)
        params = _params(data, lattice)
        return k_from_dict(data[key], lattice, params), params

    def do_kstruct_check(self, data, budget):
        s, params = self._structure(data)
        diagnostics = kstruct.check_k(s, params)
        closed = diagnostics.is_valid and kstruct.is_k_closed(s, params)
        output = {**diagnostics.to_dict(), "closed": closed}
        return output, EXIT_HOLDS if diagnostics.is_valid else EXIT_COUNTEREXAMPLE

    def do_kstruct_reinterpret(self, data, budget):
        s, params = self._structure(data)
        scheme = data.get("scheme", "phi")
        if scheme == "phi":
            result = kstruct.reinterpret(s, kstruct.phi_less_scheme())
            return {**result.to_dict(), "fixed_point": result.less == s.less}, EXIT_HOLDS
        result = kstruct.reinterpret(s.to_relational(), kstruct.scheme_from_dict(scheme))
        return result.to_dict(), EXIT_HOLDS

    def do_lift(self, data, budget):
        lattice = codec.lattice_of(data)
        ordered = codec.ordered_of(data, lattice)
        return transfer.lift(ordered, _params(data, lattice), budget).to_dict(), EXIT_HOLDS

    def do_represent(self, data, budget):
        s, params = self._structure(data)
        return transfer.represent(s).to_dict(), EXIT_HOLDS

    def do_kernel(self, data, budget):
        s, params = self._structure(data)
        ordered = codec.ordered_of(data["ordered"], s.lattice)
        return transfer.kernel(s, ordered, params).to_dict(), EXIT_HOLDS

    def do_amalgamate(self, data, budget):
        base, params = self._structure(data, "base")
        k1, _ = self._structure(data, "K1")
        k2, _ = self._structure(data, "K2")
        amalgam = engine.amalgamate_k(
            base, k1, _mapping(data.get("f1")), k2, _mapping(data.get("f2")), params, budget
        )
        output = {
            "structure": amalgam.structure.to_dict(),
            "left": amalgam.left,
            "right": amalgam.right,
            "strong": amalgam.is_strong(len(base)),
        }
        return output, EXIT_HOLDS

    def do_complete(self, data, budget):
        c, params = self._structure(data, "C")
        b, _ = self._structure(data, "B")
        cover = [_mapping(f) for f in data.get("cover", [])]
        return engine.complete(c, b, cover, params, budget).to_dict(), EXIT_HOLDS

    def do_enumerate(self, data, budget):
        lattice = codec.lattice_of(data)
        params = params_from_dict(lattice, data["params"]) if data.get("params") else None
        found = enumerate_structures(
            data.get("family", "space"), lattice, int(data["n"]), params, budget
        )
        return {"count": len(found), "structures": [x.to_dict() for x in found]}, EXIT_HOLDS

    def _verdict(self, kind, data, budget):
        if budget:
            data = {**data, "budget": budget}
        verdict = run_problem(kind, data)
        return verdict.to_dict(), verdict.exit_code

    def do_ramsey_check(self, data, budget):
        return self._verdict("ramsey-check", data, budget)

    def do_ramsey_search(self, data, budget):
        return self._verdict("ramsey-search", data, budget)

    def do_expansion_check(self, data, budget):
        return self._verdict("expansion-check", data, budget)

    # 扩张性质的小结构
    def do_gadget(self, data, budget):
        lattice = codec.lattice_of(data)
        return gadget_pi(lattice, str(data["E"]), _params(data, lattice)).to_dict(), EXIT_HOLDS

    def do_reverse(self, data, budget):
        lattice = codec.lattice_of(data)
        ordered = codec.ordered_of(data, lattice)
        return order_reversal(ordered, data.get("slots", [])).to_dict(), EXIT_HOLDS
