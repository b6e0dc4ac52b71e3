#!/usr/bin/env python3
"""Cut a small WordNet 3.0 excerpt for the test fixtures.

Usage: extract_wordnet_subset.py <wordnet-3.0 dict dir> <out dir>

Index lines are copied verbatim for the requested lemmas and for the head
word of every copied synset (sense numbers stay correct).  Data lines are
copied verbatim for the first sense of each copied index line plus the
full hypernym closure, so offsets are the original WordNet offsets, not byte
positions in the excerpt.  Exception lists are copied whole.
"""
import os
import re
import shutil
import sys

NOUNS = """
entity car truck bus bicycle dog cat wolf lion horse cow sword knife gun rifle
pistol house palace tower church ship boat letter book map money gold ring
necklace key door window table chair bed uncle aunt father mother brother sister
son daughter king queen soldier doctor teacher police thief detective farmer
priest city village forest river mountain island bridge road prison hospital
school bank store market army crowd family friend enemy stranger woman man girl
boy child baby body truth secret plan treasure weapon bomb phone camera film
photograph song poem party wedding war battle murder crime job company work
business food wine bread coffee apple craft buzz land clone trooper gunner can
spray robot disgust pox yard hand mission bird male female thing group person
relative truth mirror lamp coin
""".split()

VERBS = """
go come arrive leave return escape flee enter depart run walk wander hurry hit
kick strike punch slap kill murder execute chase follow pursue see notice
discover hear steal grab seize snatch buy find get win give sell lend pass
regard describe portray view meet marry destroy ruin wreck love hate fear admire
frighten amuse surprise anger say announce declare explain help assist unleash
unlock untie transfer donate contribute begin start sit stand hang think hide
sleep insult turn fire explode fall launch use dislodge spread be
""".split()

POS = {"noun": "n", "verb": "v"}


def read_lines(path):
    with open(path, encoding="latin-1") as f:
        return f.readlines()


def parse_data(lines):
    data = {}
    for line in lines:
        if line.startswith("  "):
            continue
        fields = line.split(" | ")[0].split()
        off = fields[0]
        wcnt = int(fields[3], 16)
        words = [fields[4 + 2 * i] for i in range(wcnt)]
        i = 4 + 2 * wcnt
        pcnt = int(fields[i])
        i += 1
        hyper = []
        for _ in range(pcnt):
            sym, target, pos = fields[i], fields[i + 1], fields[i + 2]
            if sym in ("@", "@i") and pos == fields[2]:
                hyper.append(target)
            i += 4
        data[off] = (line, words, hyper)
    return data


def parse_index(lines):
    index = {}
    for line in lines:
        if line.startswith("  "):
            continue
        fields = line.split()
        pcnt = int(fields[3])
        offsets = fields[4 + pcnt + 2:]
        index[fields[0]] = (line, offsets)
    return index


def head_word(word):
    return re.sub(r"\(.*\)$", "", word).lower()


def main(src, out):
    os.makedirs(out, exist_ok=True)
    for pos, wanted in (("noun", NOUNS), ("verb", VERBS)):
        data_lines = read_lines(os.path.join(src, "data." + pos))
        index_lines = read_lines(os.path.join(src, "index." + pos))
        header = [l for l in data_lines if l.startswith("  ")]
        data = parse_data(data_lines)
        index = parse_index(index_lines)

        keep_index = set()
        keep_data = set()
        queue = [w for w in wanted if w in index]
        missing = [w for w in wanted if w not in index]
        if missing:
            print(f"{pos}: not in WordNet: {' '.join(missing)}", file=sys.stderr)
        while queue:
            lemma = queue.pop()
            if lemma in keep_index:
                continue
            keep_index.add(lemma)
            stack = [index[lemma][1][0]]
            while stack:
                off = stack.pop()
                if off in keep_data:
                    continue
                keep_data.add(off)
                _, words, hyper = data[off]
                head = head_word(words[0])
                if head not in keep_index:
                    queue.append(head)
                stack.extend(hyper)

        with open(os.path.join(out, "index." + pos), "w", encoding="latin-1") as f:
            f.writelines(header)
            for lemma in sorted(keep_index):
                f.write(index[lemma][0])
        with open(os.path.join(out, "data." + pos), "w", encoding="latin-1") as f:
            f.writelines(header)
            for off in sorted(keep_data):
                f.write(data[off][0])
        shutil.copy(os.path.join(src, pos + ".exc"), os.path.join(out, pos + ".exc"))
        print(f"{pos}: {len(keep_index)} index lines, {len(keep_data)} synsets")
    shutil.copy(os.path.join(src, "LICENSE"), os.path.join(out, "LICENSE"))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
