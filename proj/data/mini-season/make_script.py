#!/usr/bin/env python3
# Copyright 2026 The narrmem Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the plot files and the scripted chat rules of the mini season.

The rules stand in for a chat model when fixtures are recorded:
  narrmem --config config.record.json ingest|preprocess|extract|generate
Only this script and its outputs are checked in; re-run it after editing the
story, then re-record.
"""

import json
import os
import re

HERE = os.path.dirname(os.path.abspath(__file__))
SERIES = "harbor-general"

# (raw sentence, [(simplified, resolved or None)])
S = lambda text, resolved=None: (text, resolved)

EPISODES = {
    "S01E01": [
        ("Lena Ortiz starts her first day as a surgical intern at Harbor General.",
         [S("Lena Ortiz starts her first day as a surgical intern at Harbor General.")]),
        ("Chief Ada Brennan tells the new interns that the intern with the best record this month will perform a solo appendectomy.",
         [S("Chief Ada Brennan tells the new interns that the intern with the best record this month will perform a solo appendectomy.")]),
        ("Owen Marsh boasts that the solo surgery is already his.",
         [S("Owen Marsh boasts that the solo surgery is already his.",
            "Owen Marsh boasts that the solo surgery is already Owen Marsh's.")]),
        ("Lena is assigned to the attending surgeon Sam Whitaker.",
         [S("Lena is assigned to the attending surgeon Sam Whitaker.")]),
        ("Lena recognizes Sam as the man she kissed at a bar the night before.",
         [S("Lena recognizes Sam as the man she kissed at a bar the night before.",
            "Lena recognizes Sam as the man Lena kissed at a bar the night before.")]),
        ("Sam pretends not to know her.",
         [S("Sam pretends not to know her.", "Sam pretends not to know Lena.")]),
        ("Walter Hale, an old lighthouse keeper, arrives in the emergency room with a fishing hook lodged in his throat.",
         [S("Walter Hale is an old lighthouse keeper."),
          S("Walter Hale arrives in the emergency room with a fishing hook lodged in his throat.")]),
        ("His daughter June Hale says that Walter refused to leave the lighthouse for three days.",
         [S("His daughter June Hale says that Walter refused to leave the lighthouse for three days.",
            "Walter's daughter June Hale says that Walter refused to leave the lighthouse for three days.")]),
        ("Sam and Lena examine Walter, and Sam decides to operate at once.",
         [S("Sam and Lena examine Walter."), S("Sam decides to operate at once.")]),
        ("Owen tries to take over the case, but Sam sends him back to the wards.",
         [S("Owen tries to take over the case."),
          S("Sam sends him back to the wards.", "Sam sends Owen back to the wards.")]),
        ("Nurse Felix Park warns Lena that Sam never dates colleagues.",
         [S("Nurse Felix Park warns Lena that Sam never dates colleagues.")]),
        ("During the surgery Walter's heart stops.",
         [S("During the surgery Walter's heart stops.")]),
        ("Lena performs chest compressions until Walter's heart starts again.",
         [S("Lena performs chest compressions until Walter's heart starts again.")]),
        ("Sam removes the hook and closes the wound.",
         [S("Sam removes the hook."), S("Sam closes the wound.")]),
        ("After the operation Sam thanks Lena for keeping her nerve.",
         [S("After the operation Sam thanks Lena for keeping her nerve.")]),
        ("Sam and Lena argue in the on-call room about the kiss.",
         [S("Sam and Lena argue in the on-call room about the kiss.")]),
        ("They kiss again.",
         [S("They kiss again.", "Sam and Lena kiss again.")]),
        ("Felix sees them leave the on-call room together.",
         [S("Felix sees them leave the on-call room together.",
            "Felix sees Sam and Lena leave the on-call room together.")]),
        ("Owen spends the night charting extra cases to impress Brennan.",
         [S("Owen spends the night charting extra cases to impress Brennan.")]),
        ("Brennan posts the first intern rankings, and Owen is at the top.",
         [S("Brennan posts the first intern rankings."), S("Owen is at the top of the rankings.")]),
        ("Lena is second in the rankings.",
         [S("Lena is second in the rankings.")]),
        ("June sits with Walter while he recovers.",
         [S("June sits with Walter while he recovers.", "June sits with Walter while Walter recovers.")]),
        ("Walter tells June that he will finally retire from the lighthouse.",
         [S("Walter tells June that he will finally retire from the lighthouse.",
            "Walter tells June that Walter will finally retire from the lighthouse.")]),
        ("June promises to move back to the harbor to look after him.",
         [S("June promises to move back to the harbor to look after him.",
            "June promises to move back to the harbor to look after Walter.")]),
        ("Walter is discharged at the end of the day.",
         [S("Walter is discharged at the end of the day.")]),
        ("Lena asks Sam to keep their relationship secret.",
         [S("Lena asks Sam to keep their relationship secret.")]),
        ("Sam agrees, but he warns Lena that the hospital has no secrets.",
         [S("Sam agrees to keep the relationship secret."),
          S("He warns Lena that the hospital has no secrets.",
            "Sam warns Lena that the hospital has no secrets.")]),
        ("Lena goes home exhausted.",
         [S("Lena goes home exhausted.")]),
    ],
    "S01E02": [
        ("Lena arrives early to study the intern rankings.",
         [S("Lena arrives early to study the intern rankings.")]),
        ("Owen is still first, and Lena is second.",
         [S("Owen is still first in the rankings."), S("Lena is second in the rankings.")]),
        ("Brennan announces that the interns will be scored on a live suture test on Friday.",
         [S("Brennan announces that the interns will be scored on a live suture test on Friday.")]),
        ("Twin sisters Clara Vint and Dora Vint come to Harbor General for a kidney transplant.",
         [S("Twin sisters Clara Vint and Dora Vint come to Harbor General for a kidney transplant.")]),
        ("Clara is donating a kidney to Dora.",
         [S("Clara is donating a kidney to Dora.")]),
        ("Sam leads the transplant team and picks Lena to assist him.",
         [S("Sam leads the transplant team."),
          S("Sam picks Lena to assist him.", "Sam picks Lena to assist Sam.")]),
        ("Owen complains to Brennan that Sam favors Lena.",
         [S("Owen complains to Brennan that Sam favors Lena.")]),
        ("Felix Park tells Lena that he is studying for his nursing board exam.",
         [S("Felix Park tells Lena that he is studying for his nursing board exam.",
            "Felix Park tells Lena that Felix Park is studying for his nursing board exam.")]),
        ("Felix admits that he failed the exam last year.",
         [S("Felix admits that he failed the exam last year.",
            "Felix admits that Felix failed the exam last year.")]),
        ("Lena offers to quiz Felix during night shifts.",
         [S("Lena offers to quiz Felix during night shifts.")]),
        ("Before the surgery Clara panics and refuses to sign the consent form.",
         [S("Before the surgery Clara panics."), S("Clara refuses to sign the consent form.")]),
        ("Clara confesses that she is afraid of losing her own health.",
         [S("Clara confesses that she is afraid of losing her own health.",
            "Clara confesses that Clara is afraid of losing her own health.")]),
        ("Dora tells Clara that she will not accept the kidney against her will.",
         [S("Dora tells Clara that she will not accept the kidney against her will.",
            "Dora tells Clara that Dora will not accept the kidney against Clara's will.")]),
        ("Lena sits with Clara and explains the risks honestly.",
         [S("Lena sits with Clara."), S("Lena explains the risks honestly.")]),
        ("Clara signs the consent form.",
         [S("Clara signs the consent form.")]),
        ("The transplant succeeds.",
         [S("The transplant succeeds.")]),
        ("Sam and Lena celebrate in the on-call room.",
         [S("Sam and Lena celebrate in the on-call room.")]),
        ("Owen walks in on Sam and Lena in the on-call room.",
         [S("Owen walks in on Sam and Lena in the on-call room.")]),
        ("Owen threatens to tell Brennan about the relationship.",
         [S("Owen threatens to tell Brennan about the relationship.")]),
        ("Lena begs Owen to keep quiet.",
         [S("Lena begs Owen to keep quiet.")]),
        ("At the suture test Owen's hands shake, and he ties a loose knot.",
         [S("At the suture test Owen's hands shake."),
          S("He ties a loose knot.", "Owen ties a loose knot.")]),
        ("Lena finishes the suture test with the best score.",
         [S("Lena finishes the suture test with the best score.")]),
        ("Brennan moves Lena to first place in the rankings.",
         [S("Brennan moves Lena to first place in the rankings.")]),
        ("Felix quizzes himself with flash cards in the break room.",
         [S("Felix quizzes himself with flash cards in the break room.")]),
        ("Felix asks Lena to quiz him again tomorrow.",
         [S("Felix asks Lena to quiz him again tomorrow.",
            "Felix asks Lena to quiz Felix again tomorrow.")]),
        ("Clara and Dora recover in adjoining rooms.",
         [S("Clara and Dora recover in adjoining rooms.")]),
        ("Dora thanks Clara for the kidney.",
         [S("Dora thanks Clara for the kidney.")]),
        ("Sam tells Lena that he wants to stop hiding their relationship.",
         [S("Sam tells Lena that he wants to stop hiding their relationship.",
            "Sam tells Lena that Sam wants to stop hiding their relationship.")]),
        ("Lena says that she is not ready.",
         [S("Lena says that she is not ready.", "Lena says that Lena is not ready.")]),
    ],
    "S01E03": [
        ("Marcus Reed, a retired boxer, collapses at a charity match and is brought to Harbor General.",
         [S("Marcus Reed is a retired boxer."), S("Marcus Reed collapses at a charity match."),
          S("Marcus Reed is brought to Harbor General.")]),
        ("Sam diagnoses Marcus with a torn heart valve.",
         [S("Sam diagnoses Marcus with a torn heart valve.")]),
        ("Marcus insists that he will fight again next month.",
         [S("Marcus insists that he will fight again next month.",
            "Marcus insists that Marcus will fight again next month.")]),
        ("Sam tells Marcus that another fight could kill him.",
         [S("Sam tells Marcus that another fight could kill him.",
            "Sam tells Marcus that another fight could kill Marcus.")]),
        ("Owen tells Brennan about Sam and Lena.",
         [S("Owen tells Brennan about Sam and Lena.")]),
        ("Brennan calls Sam and Lena into her office.",
         [S("Brennan calls Sam and Lena into her office.")]),
        ("Brennan reminds them that attendings may not supervise interns they are dating.",
         [S("Brennan reminds them that attendings may not supervise interns they are dating.",
            "Brennan reminds Sam and Lena that attendings may not supervise interns they are dating.")]),
        ("Brennan reassigns Lena to another attending.",
         [S("Brennan reassigns Lena to another attending.")]),
        ("Lena is angry with Owen for betraying her.",
         [S("Lena is angry with Owen for betraying her.",
            "Lena is angry with Owen for betraying Lena.")]),
        ("Felix passes a practice board exam with Lena's help.",
         [S("Felix passes a practice board exam with Lena's help.")]),
        ("Felix celebrates by buying Lena coffee.",
         [S("Felix celebrates by buying Lena coffee.")]),
        ("Marcus's trainer brings a contract for the fight to the hospital.",
         [S("Marcus's trainer brings a contract for the fight to the hospital.")]),
        ("Marcus tears up the contract after talking with Sam.",
         [S("Marcus tears up the contract after talking with Sam.")]),
        ("Sam repairs Marcus's heart valve.",
         [S("Sam repairs Marcus's heart valve.")]),
        ("Marcus thanks Sam and says that he will coach young boxers instead.",
         [S("Marcus thanks Sam."),
          S("Marcus says that he will coach young boxers instead.",
            "Marcus says that Marcus will coach young boxers instead.")]),
        ("Brennan announces the final rankings of the month.",
         [S("Brennan announces the final rankings of the month.")]),
        ("Lena finishes first and wins the solo appendectomy.",
         [S("Lena finishes first in the rankings."), S("Lena wins the solo appendectomy.")]),
        ("Owen congratulates Lena and apologizes for going to Brennan.",
         [S("Owen congratulates Lena."), S("Owen apologizes for going to Brennan.")]),
        ("Lena performs the solo appendectomy while Brennan observes.",
         [S("Lena performs the solo appendectomy while Brennan observes.")]),
        ("The appendectomy goes perfectly.",
         [S("The appendectomy goes perfectly.")]),
        ("Felix registers for the real board exam.",
         [S("Felix registers for the real board exam.")]),
        ("Sam and Lena decide to date openly.",
         [S("Sam and Lena decide to date openly.")]),
        ("Sam tells Lena that he is proud of her.",
         [S("Sam tells Lena that he is proud of her.",
            "Sam tells Lena that Sam is proud of Lena.")]),
        ("Lena and Owen agree to study together for the next rotation.",
         [S("Lena and Owen agree to study together for the next rotation.")]),
        ("Marcus is discharged with his old gloves in his bag.",
         [S("Marcus is discharged with his old gloves in his bag.")]),
    ],
}

# Preferred name -> surface forms, longest first.
CHARACTERS = {
    "Lena Ortiz": ["Lena Ortiz", "Lena"],
    "Sam Whitaker": ["Sam Whitaker", "Sam"],
    "Ada Brennan": ["Ada Brennan", "Brennan"],
    "Owen Marsh": ["Owen Marsh", "Owen"],
    "Felix Park": ["Felix Park", "Felix"],
    "Walter Hale": ["Walter Hale", "Walter"],
    "June Hale": ["June Hale", "June"],
    "Clara Vint": ["Clara Vint", "Clara"],
    "Dora Vint": ["Dora Vint", "Dora"],
    "Marcus Reed": ["Marcus Reed", "Marcus"],
}

PARAGRAPH = 10  # raw sentences per paragraph in the plot files

# Stored arcs the serial extractor confirms when retrieval lists them.
# Arc ids come from arc_ids.json, written after a first recording pass.
PRESENT = {"S01E02": ["Lena and Sam"],
           "S01E03": ["Lena and Sam", "Felix Studies for His Boards", "The Solo Surgery Contest"]}


def resolved_sentences(ep):
    out = []
    for _, parts in EPISODES[ep]:
        for simple, res in parts:
            out.append(res or simple)
    return out


def mentions(sentences):
    surfaces = sorted({s for v in CHARACTERS.values() for s in v}, key=len, reverse=True)
    found = []
    for i, sent in enumerate(sentences):
        taken = []
        hits = []
        for s in surfaces:
            for m in re.finditer(r"(?<![A-Za-z])" + re.escape(s) + r"(?![A-Za-z])", sent):
                if any(m.start() < e and b < m.end() for b, e in taken):
                    continue
                taken.append((m.start(), m.end()))
                hits.append((m.start(), s))
        for _, s in sorted(hits):
            found.append({"surface": s, "sentence_index": i})
    return found


def entities(found):
    seen = {m["surface"] for m in found}
    out = []
    for pref, surf in CHARACTERS.items():
        mine = [s for s in surf if s in seen]
        if mine:
            out.append({"preferred": pref, "surfaces": mine})
    return out


def rule(template, response=None, contains=(), echo_after=None):
    r = {"template": template}
    if contains:
        r["contains"] = list(contains)
    if echo_after:
        r["echo_after"] = echo_after
    else:
        r["response"] = response
    return r


def preprocess_rules():
    rules = []
    for ep, items in EPISODES.items():
        for b in range(0, len(items), 20):
            chunk = items[b:b + 20]
            out = [simple for _, parts in chunk for simple, _ in parts]
            rules.append(rule("simplify_plot", {"sentences": out},
                              [f"Episode: {ep}", chunk[0][0]]))
        for _, parts in items:
            for simple, res in parts:
                if res:
                    target = json.dumps({"sentence": simple}, separators=(",", ":"))
                    rules.append(rule("resolve_pronouns", {"sentence": res},
                                      [f"TARGET_JSON: {target}"]))
        sents = resolved_sentences(ep)
        found = mentions(sents)
        rules.append(rule("ner_extract", {"mentions": found}, [f"[0] {sents[0]}"]))
        rules.append(rule("refine_entities", {"entities": entities(found)},
                          [f"[0] {sents[0]}", "CANDIDATES:"]))
    rules.append(rule("resolve_pronouns", echo_after="TARGET_JSON:"))
    return rules


def arc(title, description, arc_type):
    return {"title": title, "description": description, "arc_type": arc_type}


LIGHTHOUSE = arc("The Lighthouse Keeper",
                 "Walter Hale, an old lighthouse keeper, survives surgery for a fishing hook "
                 "lodged in his throat and decides to retire.", "Anthology")
ANNOUNCEMENT = arc("The Solo Surgery Announcement",
                   "Chief Ada Brennan announces that the best intern of the month will perform "
                   "a solo appendectomy.", "Anthology")
ROMANCE = arc("Lena and Sam",
              "Intern Lena Ortiz and her attending Sam Whitaker begin a secret romance.", "Soap")
KISS = arc("The On-Call Room Kiss",
           "Lena Ortiz and Sam Whitaker kiss in the on-call room and agree to hide it.", "Soap")
CONTEST = arc("The Solo Surgery Contest",
              "The interns compete in the monthly rankings for the chance to perform a solo "
              "appendectomy.", "GenreSpecific")
TWINS = arc("The Twin Donors",
            "Clara Vint overcomes her fear and donates a kidney to her twin sister Dora Vint.",
            "Anthology")
BOARDS = arc("Felix Studies for His Boards",
             "Nurse Felix Park prepares to retake his nursing board exam with Lena Ortiz's help.",
             "Soap")
BOXER = arc("The Boxer's Heart",
            "Retired boxer Marcus Reed needs heart surgery and gives up a comeback fight.",
            "Anthology")


def details(ep, title, main, interfering, progression):
    return rule("agent6_enhance_details",
                {"main_characters": main, "interfering_characters": interfering,
                 "progression": progression},
                [f"in episode {ep} of", f"Title: {title}\n"])


def pipeline_rules(ids):
    r = []
    # Anthology extraction.
    r.append(rule("agent2_extract_anthology", {"arcs": [LIGHTHOUSE, ANNOUNCEMENT]},
                  ["Episode: S01E01"]))
    r.append(rule("agent2_extract_anthology", {"arcs": [TWINS]}, ["Episode: S01E02"]))
    r.append(rule("agent2_extract_anthology", {"arcs": [BOXER]}, ["Episode: S01E03"]))

    # Serial extraction. Known arcs are validated when listed; a continuing
    # arc the retrieval misses is re-extracted as new.
    r.append(rule("agent3_extract_serial",
                  {"new_arcs": [ROMANCE, KISS, CONTEST], "validations": []},
                  ["Episode: S01E01"]))
    for ep in ("S01E02", "S01E03"):
        present = PRESENT.get(ep, [])
        r.append(rule("agent3_extract_serial",
                      {"new_arcs": [a for a in [CONTEST, BOARDS] if a["title"] not in present],
                       "validations": [{"arc_id": ids[t], "present": True}
                                       for t in present if t in ids]},
                      [f"Episode: {ep}"]))

    r.append(rule("agent4_optimize_season",
                  {"same_storyline": True, "title": ROMANCE["title"],
                   "description": "Intern Lena Ortiz and her attending Sam Whitaker begin a "
                                  "secret romance that started with a kiss at a bar.",
                   "arc_type": "Soap"},
                  ["Title: Lena and Sam\n", "Title: The On-Call Room Kiss\n"]))
    r.append(rule("agent4_optimize_season", {"same_storyline": False}))

    r.append(rule("agent5_deduplicate",
                  {"duplicates": [{"members": [1, 3], "arc_type": "GenreSpecific"}]},
                  ["episode S01E01 by"]))
    r.append(rule("agent5_deduplicate", {"duplicates": []}))

    # Details per episode and arc.
    r += [
        details("S01E01", "The Lighthouse Keeper", ["Walter Hale"], ["June Hale", "Sam Whitaker"],
                ["Walter Hale arrives in the emergency room with a fishing hook lodged in his throat.",
                 "Sam Whitaker decides to operate at once.",
                 "Walter Hale's heart stops during the surgery.",
                 "Lena Ortiz restarts Walter Hale's heart with chest compressions.",
                 "Walter Hale tells June Hale that Walter Hale will retire from the lighthouse.",
                 "Lena Ortiz goes home exhausted."]),
        details("S01E01", "Lena and Sam", ["Lena Ortiz", "Sam Whitaker", "Felix Park"], [],
                ["Lena Ortiz recognizes Sam Whitaker as the man Lena Ortiz kissed at a bar.",
                 "Sam Whitaker pretends not to know Lena Ortiz.",
                 "Sam Whitaker and Lena Ortiz kiss again in the on-call room.",
                 "Felix Park sees Sam Whitaker and Lena Ortiz leave the on-call room together.",
                 "Sam Whitaker agrees to keep the relationship secret."]),
        details("S01E01", "The Solo Surgery Contest", ["Owen Marsh", "Lena Ortiz"], ["Ada Brennan"],
                ["Ada Brennan promises a solo appendectomy to the intern with the best record.",
                 "Owen Marsh boasts that the solo surgery is already his.",
                 "Ada Brennan posts the first rankings with Owen Marsh at the top.",
                 "Lena Ortiz is second in the rankings."]),
        details("S01E02", "The Twin Donors", ["Clara Vint", "Dora Vint"], ["Lena Ortiz", "Sam Whitaker"],
                ["Clara Vint comes to donate a kidney to Dora Vint.",
                 "Clara Vint refuses to sign the consent form.",
                 "Lena Ortiz explains the risks to Clara Vint honestly.",
                 "Clara Vint signs the consent form.",
                 "The transplant succeeds.",
                 "Dora Vint thanks Clara Vint for the kidney."]),
        details("S01E02", "Lena and Sam", ["Lena Ortiz", "Sam Whitaker"], ["Owen Marsh"],
                ["Sam Whitaker and Lena Ortiz celebrate in the on-call room.",
                 "Owen Marsh walks in on Sam Whitaker and Lena Ortiz.",
                 "Owen Marsh threatens to tell Ada Brennan about the relationship.",
                 "Sam Whitaker wants to stop hiding the relationship.",
                 "Lena Ortiz says that Lena Ortiz is not ready."]),
        details("S01E02", "The Solo Surgery Contest", ["Lena Ortiz", "Owen Marsh"], ["Ada Brennan"],
                ["Ada Brennan announces a live suture test.",
                 "Owen Marsh complains that Sam Whitaker favors Lena Ortiz.",
                 "Owen Marsh ties a loose knot at the suture test.",
                 "Lena Ortiz finishes the suture test with the best score.",
                 "Ada Brennan moves Lena Ortiz to first place in the rankings."]),
        details("S01E02", "Felix Studies for His Boards", ["Felix Park"], ["Lena Ortiz"],
                ["Felix Park is studying for his nursing board exam.",
                 "Felix Park admits that Felix Park failed the exam last year.",
                 "Lena Ortiz offers to quiz Felix Park during night shifts.",
                 "Felix Park quizzes himself with flash cards in the break room."]),
        details("S01E03", "The Boxer's Heart", ["Marcus Reed"], ["Sam Whitaker"],
                ["Marcus Reed collapses at a charity match.",
                 "Sam Whitaker diagnoses Marcus Reed with a torn heart valve.",
                 "Marcus Reed tears up the fight contract after talking with Sam Whitaker.",
                 "Sam Whitaker repairs Marcus Reed's heart valve.",
                 "Marcus Reed says that Marcus Reed will coach young boxers instead."]),
        details("S01E03", "Lena and Sam", ["Lena Ortiz", "Sam Whitaker"], ["Ada Brennan", "Owen Marsh"],
                ["Owen Marsh tells Ada Brennan about Sam Whitaker and Lena Ortiz.",
                 "Ada Brennan reassigns Lena Ortiz to another attending.",
                 "Sam Whitaker and Lena Ortiz decide to date openly.",
                 "Sam Whitaker tells Lena Ortiz that Sam Whitaker is proud of Lena Ortiz."]),
        details("S01E03", "The Solo Surgery Contest", ["Lena Ortiz"], ["Owen Marsh", "Ada Brennan"],
                ["Ada Brennan announces the final rankings of the month.",
                 "Lena Ortiz finishes first and wins the solo appendectomy.",
                 "Owen Marsh congratulates Lena Ortiz.",
                 "Lena Ortiz performs the solo appendectomy while Ada Brennan observes."]),
        details("S01E03", "Felix Studies for His Boards", ["Felix Park"], ["Lena Ortiz"],
                ["Felix Park passes a practice board exam with Lena Ortiz's help.",
                 "Felix Park registers for the real board exam."]),
    ]

    r.append(rule("agent7_verify_progressions", {"irrelevant": [5]},
                  ["Title: The Lighthouse Keeper\n", "[5] Lena Ortiz goes home exhausted."]))
    r.append(rule("agent7_verify_progressions", {"irrelevant": []}))

    r.append(rule("agent8_verify_roles",
                  {"main_characters": ["Lena Ortiz", "Sam Whitaker"],
                   "interfering_characters": ["Felix Park"]},
                  ["Title: Lena and Sam\n", '"Felix Park"]']))
    r.append(rule("agent8_verify_roles", echo_after="ROLES_JSON:"))

    r.append(rule("agent9_final_review", {"decisions": []}))

    r.append(rule("same_storyline",
                  {"same_storyline": True,
                   "reason": "Both follow the interns' race for the solo appendectomy."},
                  ["EXISTING:\nTitle: The Solo Surgery Contest\n",
                   "CANDIDATE:\nTitle: The Solo Surgery Contest\n"]))
    r.append(rule("same_storyline",
                  {"same_storyline": False, "reason": "Different storylines."}))

    r.append(rule("progression_generate",
                  {"progression": ["Felix Park passes a practice board exam.",
                                   "Felix Park buys Lena Ortiz coffee to celebrate.",
                                   "Felix Park registers for the real board exam."],
                   "interfering_characters": ["Lena Ortiz"]},
                  ["Title: Felix Studies for His Boards\n", "episode S01E03"]))
    return r


def write_plots():
    pdir = os.path.join(HERE, "plots")
    os.makedirs(pdir, exist_ok=True)
    for ep, items in EPISODES.items():
        raw = [s for s, _ in items]
        paras = [" ".join(raw[i:i + PARAGRAPH]) for i in range(0, len(raw), PARAGRAPH)]
        with open(os.path.join(pdir, f"{ep}.txt"), "w") as f:
            f.write("\n\n".join(paras) + "\n")


def main():
    ids_path = os.path.join(HERE, "arc_ids.json")
    ids = json.load(open(ids_path)) if os.path.exists(ids_path) else {}
    write_plots()
    rules = preprocess_rules() + pipeline_rules(ids)
    with open(os.path.join(HERE, "script.json"), "w") as f:
        json.dump({"rules": rules}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
