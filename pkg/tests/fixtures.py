"""Small shared fixture builders."""

from ontorec.ontology import build_distance_matrix, load_annotations, load_ontology
from ontorec.rules import RuleBase, SequentialRule

SHOP_ONTOLOGY = """\
concept Product
concept Shoes
concept Bags
concept Sneaker
concept Boot
concept Tote
isa Shoes Product
isa Bags Product
isa Sneaker Shoes
isa Boot Shoes
isa Tote Bags
instance runner Sneaker
instance trail Sneaker
instance hiker Boot
instance tote Tote
"""

SHOP_ANNOTATIONS = """\
/p/runner\trunner
/p/trail\ttrail
/p/hiker\thiker
/p/tote\ttote
/sale/tote\ttote
"""


def shop():
    o = load_ontology(SHOP_ONTOLOGY)
    ann = load_annotations(SHOP_ANNOTATIONS, o)
    return o, ann, build_distance_matrix(o)


def shop_rules():
    # trail is 0 from runner (same concept), hiker 2, tote 4
    return RuleBase([
        SequentialRule(("runner",), "tote", 0.1, 0.6),
        SequentialRule(("runner",), "hiker", 0.1, 0.6),
        SequentialRule(("runner",), "trail", 0.1, 0.3),
        SequentialRule(("hiker", "runner"), "tote", 0.05, 0.9),
    ], min_sup=0.01, delta=10)
