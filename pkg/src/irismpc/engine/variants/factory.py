from irismpc.engine.variants.const_lift import ConstLiftVariant
from irismpc.engine.variants.mpc_lift import MpcLiftVariant
from irismpc.engine.variants.no_lift import NoLiftVariant
from irismpc.engine.variants.plain_mask import PlainMaskVariant


class VariantFactory:
    """Factory for comparison variants."""

    def create_variant(self, variant_type, params):
        """Create a variant instance.

        Args:
            variant_type: 'plain-mask', 'mpc-lift', 'const-lift' or 'no-lift'
            params: MatchParams

        Returns:
            ComparisonVariant instance
        """
        variant_map = {
            "plain-mask": PlainMaskVariant,
            "mpc-lift": MpcLiftVariant,
            "const-lift": ConstLiftVariant,
            "no-lift": NoLiftVariant,
        }

        creator = variant_map.get(variant_type)
        if not creator:
            raise ValueError(f"Unknown variant type: {variant_type}")

        return creator(params)
