"""guestlift: self-hosted hotel upsell toolkit.

Wine and point-of-sale recommenders over guest ratings and orders, a
persuasion-category model for targeting message tone, LLM-backed ad-copy
generation with a deterministic mock, a campaign message store, an HTTP
service tying it together, and a simulation harness measuring the
conversion-rate uplift of category-matched messaging.
"""

__version__ = "0.1.0"
