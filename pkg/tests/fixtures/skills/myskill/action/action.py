from corvid.runtime.sdk import Assistant

assist = Assistant()


def callback_book(msg):
    locs = assist.extract_entities(msg, "myskill-book_flight")
    locs = [lc["value"].lower() for lc in locs]
    if "munich" in locs:
        r = "that wouldn't be wise"
    else:
        r = "ok boss"
    assist.publish_answer(r, msg["satellite"])


assist.add_topic_callback("book_flight", callback_book)
assist.run()
