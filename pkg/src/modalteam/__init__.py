"""Modal team logic: formulas, team-semantics model checking, type and
bisimulation machinery, canonical-model satisfiability, formula-family
generators, the machine-run reduction, and frame/strictness translations."""

from .canonical import (
    DecisionResult,
    Staircase,
    build_canonical_model,
    build_staircase,
    decide,
    unravel_forest,
)
from .checker import ModelChecker, check, check_point
from .encodings import (
    gen_canon,
    gen_canon_family,
    gen_canon_prime,
    gen_chi,
    gen_max,
    gen_quantifier,
    gen_scopes,
    gen_zeta,
)
from .errors import (
    BudgetExceededError,
    ModalTeamError,
    ModelFormatError,
    ParseError,
    WellFormednessError,
)
from .formula import Formula, modal_depth, parse, print_canonical, sugar_expand
from .reduction import ATMSpec, build_pretableau_witness, cell_of, gen_component, legal_windows, location_of, reduce_input
from .structure import (
    KripkeStructure,
    Team,
    image,
    is_scope,
    load_model,
    model_from_json_dict,
    restrict,
    select,
    splits,
    successor_teams,
)
from .translate import frame_layer_translate, restrict_edges_by_layers, strict_rewrite_max
from .typesys import (
    TypeId,
    bisimilar,
    count_types,
    enumerate_types,
    exp_star,
    exp_tower,
    hintikka,
    type_lt,
    type_of,
    typeset_lt,
    types_of_team,
)

__version__ = "0.1.0"
