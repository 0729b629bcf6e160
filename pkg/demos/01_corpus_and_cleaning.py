"""
Reading DEFT files and cleaning sentences
=========================================

Load the bundled sample corpus, look at one sentence, turn the corpus into
sentence classification instances and clean them.
"""

from deftkit import corpus
from deftkit.cleaning import clean_instances, summarize
from deftkit.synthetic import bundled_corpus_dir

# the sample corpus ships with the package: train/ and dev/ folders of .deft files
data = bundled_corpus_dir()
files = corpus.list_corpus_files(data / "train")
sentences = corpus.concat_folder(files)
print(len(files), "files,", len(sentences), "sentences")

# each sentence keeps its tokens with all 8 columns
s = sentences[0]
for tok in s.tokens[:6]:
    print(f"  {tok.text:<12} {str(tok.tag):<14} {tok.start_char}-{tok.end_char}")
print("label:", s.label)

# subtask 1 view: one line of text and a 0/1 label per sentence
instances = corpus.to_classification(sentences)
print(instances[0])

# strip leading enumerators and parenthesised link placeholders
cleaned, reports = clean_instances(instances)
print(summarize(reports))
for rep in reports:
    if rep.removed_enumeration or rep.removed_links:
        print("before:", rep.original)
        print("after: ", rep.cleaned)
        break

# parsing then serialising gives back the same bytes
raw = open(files[0], "rb").read()
assert corpus.serialize_file(corpus.parse_file(raw)) == raw
