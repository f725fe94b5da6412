"""Reference stems for the Porter stemmer tests (classic 1980 algorithm).

Run: python3 porter_oracle.py   (requires nltk)
"""
from nltk.stem.porter import PorterStemmer

WORDS = """caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing happy sky
relational conditional rational valenci hesitanci digitizer conformabli radicalli
differentli vileli analogousli vietnamization predication operator feudalism decisiveness
hopefulness callousness formaliti sensitiviti sensibiliti triplicate formative formalize
electriciti electrical hopeful goodness revival allowance inference airliner gyroscopic
adjustable defensible irritant replacement adjustment dependent adoption homologou
communism activate angulariti homologous effective bowdlerize probate rate cease
controll roll generalizations oscillators broken running runs phone agre agr
disappointed frustrating useless terrible waiting ridiculous""".split()

s = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
for w in WORDS:
    print(f'("{w}", "{s.stem(w)}"),')
