"""Signature registry: resolve any of the 32 vertex signatures.

Resolution order: authored base, mirrored base, then a derived schema
composition over the base building blocks (both chiralities of the OR,
AND, and red bend).  Derived wirings are cached; `schemas()` exposes the
wiring data for auditing and for the schema data files.
"""

from __future__ import annotations

from .compose import ComposeError, Schema, derive_schema, materialize
from .templates import (
    GadgetTemplate,
    all_vertex_signatures,
    base_templates,
    get_base,
    mirror_signature,
    mirror_template,
    signature_of_template,
)


class UnknownSignature(Exception):
    pass


_pool_cache = None
_template_cache = {}
_schema_cache = {}


def building_blocks() -> dict:
    global _pool_cache
    if _pool_cache is None:
        orb = get_base("or_base")
        andb = get_base("and_base")
        bend = get_base("red_bend")
        _pool_cache = {
            "or": orb,
            "or_m": mirror_template(orb),
            "and": andb,
            "and_m": mirror_template(andb),
            "bend": bend,
            "bend_m": mirror_template(bend),
        }
    return _pool_cache


def get_template(signature: str) -> GadgetTemplate:
    """Resolve a vertex signature (e.g. 'B..|.BB'), 'bend', or 'terminator'."""
    if signature == "bend":
        return get_base("red_bend")
    if signature == "terminator":
        return get_base("terminator")
    if signature in _template_cache:
        return _template_cache[signature]
    if signature not in all_vertex_signatures():
        raise UnknownSignature(signature)

    # only the paper-figure bases short-circuit; everything else goes
    # through the schema chains (the compact authored OR variants are a
    # separate catalogue for the reducer)
    for name in ("or_base", "and_base"):
        t = base_templates()[name]
        if t.signature == signature:
            _template_cache[signature] = t
            return t
        if mirror_signature(t.signature) == signature:
            m = mirror_template(t)
            _template_cache[signature] = m
            return m

    try:
        template = _derive(signature)
    except ComposeError:
        # some signatures need composites of composites: resolve the rest
        # of the catalogue in rounds, then retry
        _resolve_rounds()
        if signature not in _template_cache:
            raise
        return _template_cache[signature]
    _template_cache[signature] = template
    return template


def _resolve_rounds():
    remaining = [s for s in all_vertex_signatures() if s not in _template_cache]
    while remaining:
        progressed = False
        for sig in list(remaining):
            try:
                _template_cache[sig] = _derive(sig)
                remaining.remove(sig)
                progressed = True
            except ComposeError:
                continue
        if not progressed:
            return


def _derive(signature: str) -> GadgetTemplate:
    """Derive via schema search, growing the pool with already-resolved
    composites when the flat building blocks do not suffice."""
    pool = dict(building_blocks())
    for sig, t in _template_cache.items():
        pool["c:" + sig] = t
    from .compose import schema_cost

    candidates = []
    for attempt_sig, flip in ((signature, False), (mirror_signature(signature), True)):
        try:
            schema = derive_schema(attempt_sig, pool)
            candidates.append((schema_cost(schema, pool), attempt_sig, flip, schema))
        except ComposeError:
            continue
    candidates.sort(key=lambda c: c[0])
    for (_cost, attempt_sig, flip, schema) in candidates:
        template = materialize(schema, pool)
        if flip:
            from .compose import MAKERS

            base_name = template.name
            template = mirror_template(
                template,
                name="composite_" + signature.replace("|", "_").replace(".", "o"),
            )
            mirrored_name = template.name

            def _maker(slot_rows, mh, _b=base_name, _m=mirrored_name):
                return mirror_template(MAKERS[_b](slot_rows, mh), name=_m)

            MAKERS[mirrored_name] = _maker
        _schema_cache[attempt_sig] = schema
        return template
    raise ComposeError(f"no schema found for {signature} with current pool")


def resolve_all(progress=None) -> dict:
    """Resolve every vertex signature, iterating until a fixpoint so that
    later signatures may build on earlier composites (the chain lemmas)."""
    out = {}
    for sig in all_vertex_signatures():
        out[sig] = get_template(sig)
        if progress:
            progress(sig)
    return out


def schemas() -> dict:
    return dict(_schema_cache)


def schema_to_dict(schema: Schema) -> dict:
    return {
        "target": schema.target,
        "instances": list(schema.instances),
        "nets": [
            {"kind": n.kind, "ends": [list(e) for e in n.ends], "target_slot": n.target_slot}
            for n in schema.nets
        ],
        "rows": list(schema.rows),
        "default_in_west": list(schema.default_in),
    }
