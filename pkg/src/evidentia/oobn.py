"""Object-oriented Bayesian networks.

A network class bundles internal nodes (each with a CPT) behind an interface
of input nodes (state space only, no CPT — they stand in for parents supplied
by the host network) and output nodes (internal nodes exposed by name).
Classes may nest instances of previously defined classes; a model is a
sequence of class definitions plus a top-level network.

``flatten`` compiles the whole model to a basic :class:`DiscreteBayesNet`:
every node of every instance gets a dot-qualified id such as
``major.Characteristics of knife used on wound``, and each bound input node
is erased — the host node becomes the parent directly. Computation always
happens on the flattened net.

Within a CPT or binding, a parent may be referenced three ways: a plain
internal/input name of the same network, or ``instance.output`` for an output
of a sibling instance. Raw node and instance names must not contain ``.``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType

from .bn import Cpt, DiscreteBayesNet, StateSpace
from .errors import (
    ClassCycle,
    DanglingInterface,
    DuplicateClass,
    DuplicateInstance,
    ParseError,
    StateSpaceMismatch,
    UnboundInput,
    UnknownClass,
    UnknownNode,
)

__all__ = [
    "InstanceSpec",
    "NetworkClass",
    "OobnModel",
    "define_class",
    "instantiate",
    "flatten",
]


def _plain_name(name: str, what: str) -> str:
    if not name:
        raise ParseError(f"{what} name must be non-empty")
    if "." in name:
        raise ParseError(f"{what} name {name!r} must not contain '.'")
    return name


@dataclass(frozen=True)
class InstanceSpec:
    """One named instance of a class, with its input bindings."""

    name: str
    of: str
    bindings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _plain_name(self.name, "instance")
        object.__setattr__(self, "bindings", MappingProxyType(dict(self.bindings)))


@dataclass(frozen=True)
class NetworkClass:
    """An immutable network class; also used for the top-level network.

    ``inputs`` carry no CPTs; ``outputs`` name internal nodes visible to the
    host as ``instance.output``.
    """

    name: str
    nodes: tuple[StateSpace, ...] = ()
    cpts: tuple[Cpt, ...] = ()
    inputs: tuple[StateSpace, ...] = ()
    outputs: tuple[str, ...] = ()
    instances: tuple[InstanceSpec, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "instances", tuple(self.instances))
        names: list[str] = []
        for sp in self.inputs + self.nodes:
            names.append(_plain_name(sp.node, "node"))
        for inst in self.instances:
            names.append(inst.name)
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise DuplicateInstance(f"names {dupes} declared twice in class {self.name!r}")
        internal = self.internal_names
        for out in self.outputs:
            if out not in internal:
                raise DanglingInterface(
                    f"output {out!r} of class {self.name!r} is not an internal node"
                )
        by_node = {c.node: c for c in self.cpts}
        for sp in self.inputs:
            if sp.node in by_node:
                raise DanglingInterface(
                    f"input {sp.node!r} of class {self.name!r} must not carry a CPT"
                )
        for sp in self.nodes:
            if sp.node not in by_node:
                raise DanglingInterface(
                    f"internal node {sp.node!r} of class {self.name!r} has no CPT"
                )
        for c in self.cpts:
            if c.node not in internal:
                raise DanglingInterface(
                    f"CPT for {c.node!r} does not match an internal node of {self.name!r}"
                )
        for inst in self.instances:
            if inst.of == self.name:
                raise ClassCycle(f"class {self.name!r} contains an instance of itself")

    @property
    def internal_names(self) -> frozenset[str]:
        return frozenset(sp.node for sp in self.nodes)

    @property
    def input_names(self) -> frozenset[str]:
        return frozenset(sp.node for sp in self.inputs)

    def space_of(self, name: str) -> StateSpace:
        for sp in self.nodes + self.inputs:
            if sp.node == name:
                return sp
        raise UnknownNode(f"class {self.name!r} has no node {name!r}")

    def instance_named(self, name: str) -> InstanceSpec:
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise UnknownNode(f"network {self.name!r} has no instance {name!r}")


@dataclass(frozen=True)
class OobnModel:
    """Ordered class definitions plus the top-level network.

    Classes are define-before-use: an instance may only reference a class
    that appears earlier in ``classes``, which rules out cycles structurally.
    """

    classes: tuple[NetworkClass, ...] = ()
    top: NetworkClass = field(default_factory=lambda: NetworkClass("top"))

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        seen: dict[str, NetworkClass] = {}
        for cls in self.classes:
            if cls.name in seen:
                raise DuplicateClass(f"class {cls.name!r} defined twice")
            for inst in cls.instances:
                if inst.of == cls.name:
                    raise ClassCycle(f"class {cls.name!r} contains an instance of itself")
                if inst.of not in seen:
                    raise UnknownClass(
                        f"class {cls.name!r} instantiates {inst.of!r} before it is defined"
                    )
            seen[cls.name] = cls
        for inst in self.top.instances:
            if inst.of not in seen:
                raise UnknownClass(f"top-level instance {inst.name!r} of unknown class {inst.of!r}")

    def class_named(self, name: str) -> NetworkClass:
        for cls in self.classes:
            if cls.name == name:
                return cls
        raise UnknownClass(f"no class named {name!r}")


def define_class(model: OobnModel, cls: NetworkClass) -> OobnModel:
    """Append a class definition; the registry is append-only."""
    if any(c.name == cls.name for c in model.classes):
        raise DuplicateClass(f"class {cls.name!r} defined twice")
    return OobnModel(model.classes + (cls,), model.top)


def _space_of_ref(model: OobnModel, net: NetworkClass, ref: str) -> StateSpace:
    """State space of a reference in ``net``'s namespace."""
    if "." in ref:
        inst_name, out = ref.split(".", 1)
        inst = net.instance_named(inst_name)
        sub = model.class_named(inst.of)
        if out not in sub.outputs:
            raise UnknownNode(
                f"{ref!r}: class {sub.name!r} does not expose an output {out!r}"
            )
        return sub.space_of(out)
    return net.space_of(ref)


def instantiate(
    model: OobnModel,
    class_name: str,
    instance_name: str,
    bindings: Mapping[str, str],
) -> OobnModel:
    """Add an instance to the top-level network; bindings are type-checked."""
    cls = model.class_named(class_name)
    taken = (
        {i.name for i in model.top.instances}
        | model.top.internal_names
        | model.top.input_names
    )
    if instance_name in taken:
        raise DuplicateInstance(f"name {instance_name!r} already used at top level")
    for input_name, host_ref in bindings.items():
        input_space = None
        for sp in cls.inputs:
            if sp.node == input_name:
                input_space = sp
        if input_space is None:
            raise UnknownNode(f"class {class_name!r} has no input {input_name!r}")
        host_space = _space_of_ref(model, model.top, host_ref)
        if host_space.states != input_space.states:
            raise StateSpaceMismatch(
                f"binding {host_ref!r} -> {class_name}.{input_name}: states "
                f"{list(host_space.states)} != {list(input_space.states)}"
            )
    spec = InstanceSpec(instance_name, class_name, dict(bindings))
    return OobnModel(model.classes, replace(model.top, instances=model.top.instances + (spec,)))


def _resolve(
    model: OobnModel,
    net: NetworkClass,
    prefix: str,
    inbound: Mapping[str, str],
    ref: str,
) -> str:
    """Fully qualified id of a reference made inside ``net`` at ``prefix``."""
    if "." in ref:
        inst_name, out = ref.split(".", 1)
        inst = net.instance_named(inst_name)
        sub = model.class_named(inst.of)
        if out not in sub.outputs:
            raise UnknownNode(
                f"{ref!r}: class {sub.name!r} does not expose an output {out!r}"
            )
        return f"{prefix}{inst_name}.{out}"
    if ref in net.input_names:
        try:
            return inbound[ref]
        except KeyError:
            raise UnboundInput(
                f"input {ref!r} of {net.name!r} is not bound by the host network"
            ) from None
    if ref in net.internal_names:
        return prefix + ref
    raise UnknownNode(f"network {net.name!r} has no node {ref!r}")


def _emit(
    model: OobnModel,
    net: NetworkClass,
    prefix: str,
    inbound: Mapping[str, str],
    spaces: list[StateSpace],
    cpts: list[Cpt],
) -> None:
    for sp in net.nodes:
        spaces.append(StateSpace(prefix + sp.node, sp.states, sp.constant))
    for inst in net.instances:
        sub = model.class_named(inst.of)
        sub_inbound: dict[str, str] = {}
        for input_space in sub.inputs:
            if input_space.node not in inst.bindings:
                raise UnboundInput(
                    f"instance {prefix}{inst.name!r}: input {input_space.node!r} is unbound"
                )
            sub_inbound[input_space.node] = _resolve(
                model, net, prefix, inbound, inst.bindings[input_space.node]
            )
        _emit(model, sub, f"{prefix}{inst.name}.", sub_inbound, spaces, cpts)
    for cpt in net.cpts:
        qualified_parents = tuple(
            _resolve(model, net, prefix, inbound, p) for p in cpt.parents
        )
        cpts.append(Cpt(prefix + cpt.node, qualified_parents, cpt.rows))


def flatten(model: OobnModel) -> DiscreteBayesNet:
    """Compile to a basic net with dot-qualified node ids.

    Input nodes vanish: every reference to a bound input resolves to the host
    node itself, so the flattened net contains only nodes that carry CPTs.
    """
    spaces: list[StateSpace] = []
    cpts: list[Cpt] = []
    _emit(model, model.top, "", {}, spaces, cpts)
    return DiscreteBayesNet.from_cpts(spaces, cpts)
