#!/usr/bin/env python3
"""Boot a complete assistant in one process and replay the two-room scene:
both satellites hear the wake word, the earlier one wins arbitration, the
light skill answers, and only the winning room hears the reply.

    python3 demos/assistant_interaction.py
"""

import io
import time
from pathlib import Path

from corvid.bus import broker_start, register_client
from corvid.datagen import build_lm, expand
from corvid.dialog.service import CoreServices
from corvid.dsl import load_bundle
from corvid.nlu import train_nlu
from corvid.runtime.sdk import Assistant
from corvid.satellite import SatelliteConfig, connect_satellite

SKILL = Path(__file__).parent.parent / "tests" / "fixtures" / "skills" / "light_control"


def main():
    print("== boot: broker, core services, light skill, two satellites ==")
    broker = broker_start()
    bundle = load_bundle(SKILL)
    examples = expand(bundle, seed=1)
    services = CoreServices(broker, train_nlu(examples, [bundle]),
                            lm=build_lm(examples, order=3),
                            satellites=("Alpha", "Beta"))

    skill_session = register_client(broker, "skill-light_control",
                                    read=set(bundle.manifest.topics_read),
                                    write=set(bundle.manifest.topics_write))
    assist = Assistant(session=skill_session)

    def on_light(msg):
        rooms = [e["value"] for e in msg["entities"] if e["entity"] == "room"]
        where = rooms[0] if rooms else "here"
        print("   [skill] turning on the light in the %s for %s"
              % (where, msg["satellite"]))
        assist.publish_answer("turning the light in the %s on" % where,
                              msg["satellite"])

    assist.add_topic_callback("turn_on_light", on_light)

    alpha = connect_satellite(broker, SatelliteConfig(id="Alpha"), out=io.StringIO())
    beta = connect_satellite(broker, SatelliteConfig(id="Beta"), out=io.StringIO())

    print('\n== Alpha: "computer turn on the light in the lab" ==')
    print('== Beta (100 ms later): "computer turn on the light in the kitchen" ==')
    alpha.feed_line("computer turn on the light in the lab")
    time.sleep(0.1)
    beta.feed_line("computer turn on the light in the kitchen")

    alpha.wait_for_transcript(1, timeout=10)
    beta.wait_for_transcript(1, timeout=10)
    time.sleep(0.2)

    print("\n== what each room heard ==")
    for sat in (alpha, beta):
        for line in sat.transcript:
            print("  %s" % line)

    print("\n== session log ==")
    for tr in services.manager.transitions:
        print("  session=%s %s -> %s (%s)" % (tr.session_id, tr.from_state,
                                              tr.to_state, tr.reason))

    for closer in (alpha.close, beta.close, assist.stop, skill_session.close,
                   services.close, broker.close):
        closer()


if __name__ == "__main__":
    main()
