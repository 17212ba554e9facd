"""Random generators and the forward derivation builder used by the tests."""

import random

from dcalc.hseq import HDerivation, HSequent, _item_gaps, enumerate_rule_instances
from dcalc.syntax import (
    EMPTY,
    SEP,
    Atom,
    DDown,
    DProd,
    DUp,
    HyperConfig,
    Leaf0,
    Occurrence,
    Over,
    Prod,
    Separator,
    SortError,
    Under,
    UnitI,
    UnitJ,
    config_at,
    figure,
    figure_items,
    flatten,
    generalized_wrap,
    item_at,
    iter_items,
    replace_range,
    sep_index_at,
    sort_of_config,
    sort_of_type,
    splice_item,
    wrap_at,
)
from dcalc.terms import Cat, ConstI, ConstJ, Leaf, WrapT, sort_of_term

# ---------------------------------------------------------------------------
# random objects


def random_type(rng, atoms, depth):
    """A well-sorted random type over `atoms` (list of (name, sort) pairs)."""
    if depth <= 0 or rng.random() < 0.35:
        name, sort = rng.choice(atoms)
        return Atom(name, sort)
    for _ in range(8):
        kind = rng.choice(("prod", "under", "over", "dprod", "ddown", "dup", "unit"))
        try:
            if kind == "unit":
                return rng.choice((UnitI(), UnitJ()))
            a = random_type(rng, atoms, depth - 1)
            b = random_type(rng, atoms, depth - 1)
            if kind == "prod":
                return Prod(a, b)
            if kind == "under":
                return Under(a, b)
            if kind == "over":
                return Over(a, b)
            if kind == "dprod":
                return DProd(rng.randint(1, max(1, sort_of_type(a))), a, b)
            if kind == "ddown":
                return DDown(rng.randint(1, max(1, sort_of_type(a))), a, b)
            k_hi = max(1, sort_of_type(a) + 1 - sort_of_type(b))
            return DUp(rng.randint(1, k_hi), a, b)
        except SortError:
            continue
    name, sort = rng.choice(atoms)
    return Atom(name, sort)


def random_term(rng, atoms, depth):
    """A well-sorted random structural term with atomic leaf types."""
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.15:
            return ConstI()
        if r < 0.3:
            return ConstJ()
        name, sort = rng.choice(atoms)
        return Leaf(Atom(name, sort))
    left = random_term(rng, atoms, depth - 1)
    right = random_term(rng, atoms, depth - 1)
    if sort_of_term(left) == 0 or rng.random() < 0.5:
        return Cat(left, right)
    return WrapT(rng.randint(1, sort_of_term(left)), left, right)


def random_config(rng, atoms, budget=12, nesting=3):
    """A random hyperconfiguration with at most `budget` items in total."""
    cell = [budget]
    return _rand_cfg(rng, atoms, cell, nesting)


def _rand_cfg(rng, atoms, cell, nesting):
    sort0 = [a for a in atoms if a[1] == 0]
    high = [a for a in atoms if a[1] >= 1]
    items = []
    while cell[0] > 0 and len(items) < 5 and rng.random() < 0.72:
        cell[0] -= 1
        r = rng.random()
        if r < 0.3:
            items.append(SEP)
        elif r < 0.7 or nesting <= 0 or not high:
            name, sort = rng.choice(sort0)
            items.append(Leaf0(Atom(name, sort)))
        else:
            name, sort = rng.choice(high)
            gaps = tuple(
                _rand_cfg(rng, atoms, cell, nesting - 1) for _ in range(sort)
            )
            items.append(Occurrence(Atom(name, sort), gaps))
    return HyperConfig(tuple(items))


# ---------------------------------------------------------------------------
# forward derivation generation
#
# Each builder turns derivations already in the pool into the conclusion of
# one more rule application, then recovers the rule parameters by matching
# the premises among the enumerated instances of the conclusion.


def hderivation_depth(d):
    return 1 + max((hderivation_depth(p) for p in d.premises), default=0)


def _match_instance(rule, conclusion, children):
    want = tuple(c.conclusion for c in children)
    for _, params, premises in enumerate_rule_instances(conclusion, only_rule=rule):
        if premises == want:
            return HDerivation(rule, conclusion, children, params)
    return None


def _figure_type(item):
    """The item's type when the item on its own is a figure, else None."""
    if isinstance(item, Separator):
        return None
    if isinstance(item, Occurrence) and any(g.items for g in item.gaps):
        return None
    return item.type


def _levels(cfg, prefix=()):
    yield prefix, cfg
    for i, item in enumerate(cfg.items):
        if isinstance(item, Occurrence):
            for g, gap in enumerate(item.gaps):
                yield from _levels(gap, prefix + (i, g))


def _items(cfg):
    return [(addr, it) for addr, it in iter_items(cfg) if not isinstance(it, Separator)]


def _g_id(rng, pool, atoms):
    t = random_type(rng, atoms, rng.randint(0, 1))
    return HDerivation("Id", HSequent(figure(t), t), (), ())


def _g_ir(rng, pool, atoms):
    return HDerivation("IR", HSequent(EMPTY, UnitI()), (), ())


def _g_jr(rng, pool, atoms):
    return HDerivation("JR", HSequent(HyperConfig((SEP,)), UnitJ()), (), ())


def _g_under_r(rng, pool, atoms):
    d = rng.choice(pool)
    items = d.conclusion.antecedent.items
    if not items:
        return None
    a = _figure_type(items[0])
    if a is None:
        return None
    concl = HSequent(HyperConfig(items[1:]), Under(a, d.conclusion.succedent))
    return _match_instance("UnderR", concl, (d,))


def _g_over_r(rng, pool, atoms):
    d = rng.choice(pool)
    items = d.conclusion.antecedent.items
    if not items:
        return None
    b = _figure_type(items[-1])
    if b is None:
        return None
    concl = HSequent(HyperConfig(items[:-1]), Over(d.conclusion.succedent, b))
    return _match_instance("OverR", concl, (d,))


def _g_down_r(rng, pool, atoms):
    d = rng.choice(pool)
    items = d.conclusion.antecedent.items
    if len(items) != 1 or not isinstance(items[0], Occurrence):
        return None
    occ = items[0]
    nonempty = [i for i, g in enumerate(occ.gaps) if g.items]
    if len(nonempty) > 1:
        return None
    k = nonempty[0] + 1 if nonempty else rng.randint(1, len(occ.gaps))
    concl = HSequent(occ.gaps[k - 1], DDown(k, occ.type, d.conclusion.succedent))
    return _match_instance("DownR", concl, (d,))


def _g_up_r(rng, pool, atoms):
    d = rng.choice(pool)
    cands = [
        (addr, it)
        for addr, it in _items(d.conclusion.antecedent)
        if _figure_type(it) is not None
    ]
    if not cands:
        return None
    addr, it = rng.choice(cands)
    gamma = splice_item(d.conclusion.antecedent, addr, (SEP,))
    k = sep_index_at(gamma, addr)
    concl = HSequent(gamma, DUp(k, d.conclusion.succedent, it.type))
    return _match_instance("UpR", concl, (d,))


def _g_prod_r(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    ant = HyperConfig(d1.conclusion.antecedent.items + d2.conclusion.antecedent.items)
    concl = HSequent(ant, Prod(d1.conclusion.succedent, d2.conclusion.succedent))
    return _match_instance("ProdR", concl, (d1, d2))


def _g_dprod_r(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    sort = sort_of_config(d1.conclusion.antecedent)
    if sort == 0:
        return None
    k = rng.randint(1, sort)
    ant = wrap_at(d1.conclusion.antecedent, k, d2.conclusion.antecedent)
    concl = HSequent(ant, DProd(k, d1.conclusion.succedent, d2.conclusion.succedent))
    return _match_instance("DProdR", concl, (d1, d2))


def _g_il(rng, pool, atoms):
    d = rng.choice(pool)
    ant = d.conclusion.antecedent
    level, cfg = rng.choice(list(_levels(ant)))
    pos = rng.randint(0, len(cfg.items))
    new_ant = replace_range(ant, level, pos, pos, (Leaf0(UnitI()),))
    concl = HSequent(new_ant, d.conclusion.succedent)
    return _match_instance("IL", concl, (d,))


def _g_jl(rng, pool, atoms):
    d = rng.choice(pool)
    ant = d.conclusion.antecedent
    level, cfg = rng.choice(list(_levels(ant)))
    i = rng.randint(0, len(cfg.items))
    j = rng.randint(i, len(cfg.items))
    gap = HyperConfig(cfg.items[i:j])
    occ = Occurrence(UnitJ(), (gap,))
    new_ant = replace_range(ant, level, i, j, (occ,))
    concl = HSequent(new_ant, d.conclusion.succedent)
    return _match_instance("JL", concl, (d,))


def _g_prod_l(rng, pool, atoms):
    d = rng.choice(pool)
    ant = d.conclusion.antecedent
    spots = []
    for level, cfg in _levels(ant):
        for p in range(len(cfg.items) - 1):
            if not isinstance(cfg.items[p], Separator) and not isinstance(
                cfg.items[p + 1], Separator
            ):
                spots.append((level, p))
    if not spots:
        return None
    level, p = rng.choice(spots)
    cfg = config_at(ant, level)
    x, y = cfg.items[p], cfg.items[p + 1]
    t = Prod(x.type, y.type)
    new = figure_items(t, _item_gaps(x) + _item_gaps(y))
    new_ant = replace_range(ant, level, p, p + 2, new)
    concl = HSequent(new_ant, d.conclusion.succedent)
    return _match_instance("ProdL", concl, (d,))


def _g_dprod_l(rng, pool, atoms):
    d = rng.choice(pool)
    ant = d.conclusion.antecedent
    spots = []
    for addr, it in _items(ant):
        if not isinstance(it, Occurrence):
            continue
        for g, gap in enumerate(it.gaps):
            if len(gap.items) == 1 and not isinstance(gap.items[0], Separator):
                spots.append((addr, g))
    if not spots:
        return None
    addr, g = rng.choice(spots)
    it = item_at(ant, addr)
    inner = it.gaps[g].items[0]
    try:
        t = DProd(g + 1, it.type, inner.type)
    except SortError:
        return None
    new_gaps = it.gaps[:g] + _item_gaps(inner) + it.gaps[g + 1 :]
    new_ant = splice_item(ant, addr, figure_items(t, new_gaps))
    concl = HSequent(new_ant, d.conclusion.succedent)
    return _match_instance("DProdL", concl, (d,))


def _g_under_l(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    a = sort_of_type(d1.conclusion.succedent)
    cands = [(addr, it) for addr, it in _items(d2.conclusion.antecedent)
             if len(_item_gaps(it)) >= a]
    if not cands:
        return None
    addr, it = rng.choice(cands)
    g = _item_gaps(it)
    try:
        t = Under(d1.conclusion.succedent, it.type)
    except SortError:
        return None
    region = generalized_wrap(d1.conclusion.antecedent, g[:a]).items
    new = region + figure_items(t, g[a:])
    new_ant = splice_item(d2.conclusion.antecedent, addr, new)
    concl = HSequent(new_ant, d2.conclusion.succedent)
    return _match_instance("UnderL", concl, (d1, d2))


def _g_over_l(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    b = sort_of_type(d1.conclusion.succedent)
    cands = [(addr, it) for addr, it in _items(d2.conclusion.antecedent)
             if len(_item_gaps(it)) >= b]
    if not cands:
        return None
    addr, it = rng.choice(cands)
    g = _item_gaps(it)
    try:
        t = Over(it.type, d1.conclusion.succedent)
    except SortError:
        return None
    region = generalized_wrap(d1.conclusion.antecedent, g[len(g) - b :] if b else ()).items
    new = figure_items(t, g[: len(g) - b]) + region
    new_ant = splice_item(d2.conclusion.antecedent, addr, new)
    concl = HSequent(new_ant, d2.conclusion.succedent)
    return _match_instance("OverL", concl, (d1, d2))


def _g_up_l(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    b = sort_of_type(d1.conclusion.succedent)
    cands = [(addr, it) for addr, it in _items(d2.conclusion.antecedent)
             if len(_item_gaps(it)) >= b + 1 or (b >= 1 and len(_item_gaps(it)) >= b)]
    if not cands:
        return None
    addr, it = rng.choice(cands)
    g = _item_gaps(it)
    k_hi = len(g) - b + 1
    if k_hi < 1:
        return None
    k = rng.randint(1, k_hi)
    try:
        t = DUp(k, it.type, d1.conclusion.succedent)
    except SortError:
        return None
    region = generalized_wrap(d1.conclusion.antecedent, g[k - 1 : k - 1 + b])
    new_gaps = g[: k - 1] + (region,) + g[k - 1 + b :]
    new_ant = splice_item(d2.conclusion.antecedent, addr, figure_items(t, new_gaps))
    concl = HSequent(new_ant, d2.conclusion.succedent)
    return _match_instance("UpL", concl, (d1, d2))


def _g_down_l(rng, pool, atoms):
    d1, d2 = rng.choice(pool), rng.choice(pool)
    a = sort_of_type(d1.conclusion.succedent)
    if a == 0:
        return None
    gamma = d1.conclusion.antecedent
    top_seps = [p for p, x in enumerate(gamma.items) if isinstance(x, Separator)]
    if not top_seps:
        return None
    pos = rng.choice(top_seps)
    k = sep_index_at(gamma, (pos,))
    cands = [(addr, it) for addr, it in _items(d2.conclusion.antecedent)
             if len(_item_gaps(it)) >= a - 1]
    if not cands:
        return None
    addr, it = rng.choice(cands)
    g = _item_gaps(it)
    contl, contr = g[: k - 1], g[len(g) - (a - k) :] if a - k else ()
    item_gaps = g[k - 1 : len(g) - (a - k)] if a - k else g[k - 1 :]
    try:
        t = DDown(k, d1.conclusion.succedent, it.type)
    except SortError:
        return None
    absl, absr = HyperConfig(gamma.items[:pos]), HyperConfig(gamma.items[pos + 1 :])
    region_l = generalized_wrap(absl, contl).items
    region_r = generalized_wrap(absr, contr).items
    new = region_l + figure_items(t, item_gaps) + region_r
    new_ant = splice_item(d2.conclusion.antecedent, addr, new)
    concl = HSequent(new_ant, d2.conclusion.succedent)
    return _match_instance("DownL", concl, (d1, d2))


_BUILDERS = (
    _g_under_r,
    _g_over_r,
    _g_down_r,
    _g_up_r,
    _g_prod_r,
    _g_dprod_r,
    _g_il,
    _g_jl,
    _g_prod_l,
    _g_dprod_l,
    _g_under_l,
    _g_over_l,
    _g_up_l,
    _g_down_l,
)


def generate_derivations(rng, atoms, want, max_depth=5, max_flat=12):
    """Grow random valid derivations; returns `want` of depth >= 2."""
    pool = [_g_id(rng, [], atoms) for _ in range(10)]
    pool.append(_g_ir(rng, pool, atoms))
    pool.append(_g_jr(rng, pool, atoms))
    out = []
    attempts = 0
    while len(out) < want and attempts < want * 200:
        attempts += 1
        builder = rng.choice(_BUILDERS)
        try:
            d = builder(rng, pool, atoms)
        except SortError:
            d = None
        if d is None:
            continue
        if len(flatten(d.conclusion.antecedent)) > max_flat:
            continue
        depth = hderivation_depth(d)
        if depth > max_depth:
            continue
        pool.append(d)
        if depth >= 2:
            out.append(d)
        if rng.random() < 0.02:
            pool.append(_g_id(rng, pool, atoms))
    return out
