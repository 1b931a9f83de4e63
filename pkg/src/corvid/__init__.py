"""corvid: an offline-first, privacy-aware voice assistant framework.

Subpackages:
  bus        encrypted pub/sub plane with per-topic key distribution
  dsl        skill bundle parsing (dialog templates, lookups, manifests)
  datagen    training-sentence expansion and n-gram LM rescoring
  nlu        intent classification and slot extraction
  dialog     session state machine and satellite arbitration
  satellite  text-mode room client (wake word + answers)
  runtime    skill host, process isolation, and the skill SDK
  store      skill catalog service with permission warnings
"""

__version__ = "0.1.0"
