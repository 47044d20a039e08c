"""Shared vocabulary for concept graphs, parses and pair graphs."""

ISA = "isA"
IS_NAMED_ENTITY = "isNamedEntity"
IS_VITAL = "isVital"

# Relations added on top of the dependency labels, in vocabulary order
SPECIAL_RELATIONS = (ISA, IS_NAMED_ENTITY, IS_VITAL)

REVERSE_PREFIX = "rev-"

# Tag used wherever a feature does not apply
NONE_TAG = "None"

SOURCE_SENTENCE = "SENTENCE"
SOURCE_CONCEPT = "CONCEPT"
SOURCE_BOTH = "BOTH"
SOURCE_TAGS = (SOURCE_SENTENCE, SOURCE_CONCEPT, SOURCE_BOTH, NONE_TAG)

COMMENT_PREFIX = "#"
