"""First-order unification with a backtrackable binding trail.

Logic variables are bindable; eigenvariables behave as constants except in
``eigen_mgu``, which computes the most general unifier over eigenvariables
required by the invertible equality rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import BVar, Const, EigenVar, LogicVar, Term


class TrailError(RuntimeError):
    pass


@dataclass(frozen=True)
class Checkpoint:
    depth: int
    serial: int


@dataclass
class BindingStore:
    bindings: dict = field(default_factory=dict)
    trail: list = field(default_factory=list)
    _live: list = field(default_factory=list)
    _live_set: set = field(default_factory=set)
    _serial: int = 0
    _renamed: int = 0

    def checkpoint(self) -> Checkpoint:
        self._serial += 1
        cp = Checkpoint(len(self.trail), self._serial)
        self._live.append(cp.serial)
        self._live_set.add(cp.serial)
        return cp

    def _drop_after(self, cp: Checkpoint) -> None:
        while self._live[-1] != cp.serial:
            self._live_set.discard(self._live.pop())

    def rollback(self, cp: Checkpoint) -> None:
        """Undo every binding made since ``cp``; checkpoints taken after it are released."""
        if cp.serial not in self._live_set:
            raise TrailError("rollback to a released checkpoint")
        while len(self.trail) > cp.depth:
            del self.bindings[self.trail.pop()]
        self._drop_after(cp)

    def release(self, cp: Checkpoint) -> None:
        """Forget ``cp`` (and anything newer) without undoing bindings."""
        if cp.serial not in self._live_set:
            raise TrailError("release of an unknown checkpoint")
        self._drop_after(cp)
        self._live_set.discard(self._live.pop())

    def bind(self, v: LogicVar, t: Term) -> None:
        self.bindings[v.id] = t
        self.trail.append(v.id)

    def deref(self, t: Term) -> Term:
        while isinstance(t, LogicVar) and t.id in self.bindings:
            t = self.bindings[t.id]
        return t

    def resolve(self, t: Term) -> Term:
        t = self.deref(t)
        if isinstance(t, Const) and t.args:
            return Const(t.name, tuple(self.resolve(a) for a in t.args))
        return t


def resolve(t: Term, store: BindingStore) -> Term:
    return store.resolve(t)


def checkpoint(store: BindingStore) -> Checkpoint:
    return store.checkpoint()


def rollback(store: BindingStore, cp: Checkpoint) -> None:
    store.rollback(cp)


def _occurs_or_too_deep(v: LogicVar, t: Term, store: BindingStore) -> bool:
    t = store.deref(t)
    if isinstance(t, LogicVar):
        return t.id == v.id
    if isinstance(t, EigenVar):
        return t.level > v.level
    if isinstance(t, BVar):
        return True
    return any(_occurs_or_too_deep(v, a, store) for a in t.args)


def _lower_levels(v: LogicVar, t: Term, store: BindingStore) -> None:
    # unbound logic vars inside t inherit the stricter level of v
    t = store.deref(t)
    if isinstance(t, LogicVar) and t.level > v.level:
        store._renamed -= 1
        store.bind(t, LogicVar(store._renamed, v.level))
    elif isinstance(t, Const):
        for a in t.args:
            _lower_levels(v, a, store)


def _unify(s: Term, t: Term, store: BindingStore) -> bool:
    s, t = store.deref(s), store.deref(t)
    if s == t:
        return True
    if isinstance(t, LogicVar) and not isinstance(s, LogicVar):
        s, t = t, s
    if isinstance(s, LogicVar):
        if isinstance(t, LogicVar) and t.level > s.level:
            s, t = t, s
        if _occurs_or_too_deep(s, t, store):
            return False
        _lower_levels(s, t, store)
        store.bind(s, t)
        return True
    if isinstance(s, Const) and isinstance(t, Const):
        if s.name != t.name or len(s.args) != len(t.args):
            return False
        return all(_unify(a, b, store) for a, b in zip(s.args, t.args))
    return False


def unify(s: Term, t: Term, store: BindingStore) -> bool:
    """Unify ``s`` and ``t``; on failure the store is left unchanged."""
    cp = store.checkpoint()
    if _unify(s, t, store):
        store.release(cp)
        return True
    store.rollback(cp)
    store.release(cp)
    return False


# ---------------------------------------------------------------------------
# unification over eigenvariables


class Stuck(Exception):
    """Unification would need to instantiate a logic variable."""


CLASH = None


def _apply(sub: dict, t: Term) -> Term:
    if isinstance(t, EigenVar) and t in sub:
        return _apply(sub, sub[t])
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(_apply(sub, a) for a in t.args))
    return t


def _occurs(e: EigenVar, t: Term) -> bool:
    if isinstance(t, Const):
        return any(_occurs(e, a) for a in t.args)
    return t == e


def eigen_mgu(s: Term, t: Term, store: BindingStore | None = None):
    """Most general unifier of ``s`` and ``t`` treating eigenvariables as variables.

    Returns an idempotent ``dict`` from eigenvariables to terms, or ``CLASH``
    (``None``) when no unifier exists.  Unbound logic variables are rigid; if
    the answer depends on one, ``Stuck`` is raised.  Between two
    eigenvariables the younger one (higher level, then id) is bound.
    """
    if store is not None:
        s, t = store.resolve(s), store.resolve(t)
    sub: dict = {}
    todo = [(s, t)]
    stuck = False
    while todo:
        a, b = todo.pop()
        a, b = _apply(sub, a), _apply(sub, b)
        if a == b:
            continue
        if isinstance(b, EigenVar) and not isinstance(a, EigenVar):
            a, b = b, a
        if isinstance(a, EigenVar):
            if isinstance(b, EigenVar) and (b.level, b.id) > (a.level, a.id):
                a, b = b, a
            if _occurs(a, b):
                return CLASH
            sub = {k: _apply({a: b}, v) for k, v in sub.items()}
            sub[a] = b
            continue
        if isinstance(a, LogicVar) or isinstance(b, LogicVar):
            stuck = True
            continue
        if isinstance(a, Const) and isinstance(b, Const):
            if a.name != b.name or len(a.args) != len(b.args):
                return CLASH
            todo.extend(zip(a.args, b.args))
            continue
        return CLASH
    if stuck:
        raise Stuck(f"{s} = {t}")
    return sub


def apply_eigen(sub: dict, t: Term) -> Term:
    return _apply(sub, t) if sub else t
