from hypothesis import settings

# property tests run the whole pipeline per example; no fixed deadline
settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")
