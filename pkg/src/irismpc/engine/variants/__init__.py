from irismpc.engine.variants.base import ComparisonVariant
from irismpc.engine.variants.factory import VariantFactory
