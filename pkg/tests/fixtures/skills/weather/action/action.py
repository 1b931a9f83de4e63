from corvid.runtime.sdk import Assistant

assist = Assistant()


def callback_weather(msg):
    cities = [e["value"] for e in msg["entities"] if e["entity"] == "city"]
    where = cities[0] if cities else "outside"
    assist.publish_answer("no idea what the weather in %s is like" % where,
                          msg["satellite"])


assist.add_topic_callback("get_weather", callback_weather)
assist.run()
