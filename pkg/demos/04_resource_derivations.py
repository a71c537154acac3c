"""Mechanical protocol derivations over exact-rational resource expressions.

Resources: public bits [c→c]_pub, private bits [c→c]_priv, secret key
[cc]_priv, channel uses ⟨N⟩. Rules rewrite what you hold into what a
protocol produces; a relative public channel [c→c:π]_pub only accepts a
uniform input, and the engine enforces that it is consumed only by a rule
that pads it with key (the one-time pad).
"""

from fractions import Fraction

from pubpriv.resources import (
    ResourceExpr,
    ResourceKind,
    apply_rule,
    derive_ds03_child,
    derive_otp_combination,
    derive_section3,
    one_time_pad_rule,
    replay_transcript,
    secret_key_distribution_rule,
)

K = ResourceKind


def show(t):
    print(f"\n=== {t.name}  params={ {k: str(v) for k, v in t.params.items()} }")
    print("start:", t.initial.render())
    for i, step in enumerate(t.steps, 1):
        print(f"  step {i} [{step.name}]: {step.after.render()}")
    print("final:", t.final.render())
    if t.efficiency is not None:
        e = t.efficiency
        print(f"key consumed: {e.key_consumed}"
              + (f", vs optimal {e.optimal_key_rate} -> inefficient={e.inefficient}"
                 if e.optimal_key_rate is not None else ""))
    assert replay_transcript(t) == t.final  # transcripts replay exactly


# The two primitive child protocols.
print("one-time pad:      ",
      apply_rule(ResourceExpr.of((1, K.PUBLIC_CC), (1, K.PRIVATE_KEY)), one_time_pad_rule(1)).render())
print("key distribution:  ",
      apply_rule(ResourceExpr.of((1, K.PRIVATE_CC)), secret_key_distribution_rule(1)).render())

# Key-assisted private transmission from unassisted private coding: the
# relative public by-product, padded with the key, becomes private bits and
# the total lands exactly on I(X;B) private bits.
show(derive_section3(Fraction(1), Fraction(2, 5)))

# Regenerating the key from the private output and cancelling it leaves a
# protocol that consumes only a sublinear amount of key.
show(derive_ds03_child(Fraction(1), Fraction(1), Fraction(1, 3)))

# Padding the public output too gives all-private transmission, but spends
# a + c bits of key, more than the best-known requirement.
show(derive_otp_combination(Fraction(1), Fraction(1), Fraction(1, 3),
                            optimal_key_rate=Fraction(2, 3)))
