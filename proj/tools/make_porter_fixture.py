"""Regenerates tests/data/porter_vocabulary.tsv from NLTK's Porter stemmer.

Usage: python3 tools/make_porter_fixture.py [text files...] > tests/data/porter_vocabulary.tsv
Needs nltk; the ORIGINAL_ALGORITHM mode follows the 1980 rule set.
"""

import re
import sys

from nltk.stem.porter import PorterStemmer

CLASSIC = """
caresses ponies ties caress cats feed agreed plastered bled motoring sing conflated troubled sized
hopping tanned falling hissing fizzed failing filing happy sky relational conditional rational
valenci hesitanci digitizer conformabli radicalli differentli vileli analogousli vietnamization
predication operator feudalism decisiveness hopefulness callousness formaliti sensitiviti
sensibiliti triplicate formative formalize electriciti electrical hopeful goodness revival
allowance inference airliner gyroscopic adjustable defensible irritant replacement adjustment
dependent adoption homologou communism activate angulariti homologous effective bowdlerize
probate rate cease controll roll generalizations oscillators running meetings agreement
s a y as is ss ys
"""


def main(paths):
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    words = set(CLASSIC.split())
    for path in paths:
        with open(path, errors="ignore") as f:
            words.update(re.findall(r"\b[a-z]{2,}\b", f.read().lower()))
    for word in sorted(words):
        print(f"{word}\t{stemmer.stem(word)}")


if __name__ == "__main__":
    main(sys.argv[1:])
