#!/usr/bin/env python3
"""Regenerates everything under fixtures/. Output is deterministic."""
import json
import os
import random
import shutil
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

ENTITIES = {
    "abs": "abstract", "aml": "animal", "bal": "ballot", "bod": "body part",
    "com": "commodity", "fac": "facility", "gpe": "geopolitical entity",
    "inf": "information", "law": "law", "loc": "location",
    "mhi": "medical health issue", "mon": "money", "nat": "natural resource",
    "org": "organization", "per": "person", "pla": "plant", "pth": "pathogen",
    "res": "result", "sen": "sentence", "sid": "side", "ttl": "title",
    "val": "value", "veh": "vehicle", "wea": "weapon",
}

AGENT = ["per", "org", "gpe"]
PLACE = ["loc", "fac", "gpe"]
U = "unbounded"


def role(name, types, lo=0, hi=U):
    return {"name": name, "types": sorted(types), "min": lo, "max": hi}


def place():
    return role("Place", PLACE, 0, 1)


ARTIFACT = ["com", "veh", "wea", "fac", "inf", "nat"]

ROLES_BY_PREFIX = [
    ("ArtifactExistence", [role("Agent", AGENT), role("Artifact", ARTIFACT),
                           role("Instrument", ["com", "wea", "veh"]), place()]),
    ("Cognitive", [role("Agent", AGENT),
                   role("Subject", ["abs", "inf", "com", "mhi", "pth", "per", "org", "law", "res"]),
                   role("Patient", ["per", "org", "aml"]),
                   role("Tool", ["com", "inf", "fac", "veh"]),
                   role("Institution", ["org", "fac"]), place()]),
    ("Conflict.Demonstrate", [role("Demonstrator", ["per", "org"]),
                              role("Topic", ["abs", "law", "inf"]),
                              role("Target", ["per", "org", "gpe", "fac"]), place()]),
    ("Conflict", [role("Attacker", AGENT), role("Target", ["per", "org", "gpe", "fac", "veh", "com"]),
                  role("Instrument", ["wea", "veh", "com"]), place()]),
    ("Contact", [role("Agent", AGENT), role("Recipient", AGENT),
                 role("Subject", ["abs", "inf", "law", "res", "mhi", "com", "mon", "per", "org"]),
                 role("Tool", ["com", "inf", "fac"]), place()]),
    ("Control", [role("Impeder", AGENT), role("Target", ["per", "org", "gpe", "veh", "com"]), place()]),
    ("Disaster.DiseaseOutbreak", [role("Disease", ["mhi", "pth"]), role("Victim", ["per", "aml", "pla"]),
                                  place()]),
    ("Disaster", [role("Victim", ["per", "aml"]), role("Cause", ["nat", "wea", "com", "pth", "veh", "mhi"]),
                  place()]),
    ("GenericCrime", [role("Perpetrator", AGENT), role("Victim", ["per", "org", "gpe"]), place()]),
    ("Justice", [role("Authority", AGENT), role("Defendant", ["per", "org"]),
                 role("Crime", ["abs", "law"]), role("Sentence", ["sen"], 0, 1), place()]),
    ("Life.Consume", [role("Consumer", ["per", "aml"]), role("ConsumedThing", ["com", "nat", "pla", "aml"]),
                      place()]),
    ("Life.Die", [role("Victim", ["per", "aml"]), role("Killer", AGENT + ["wea", "mhi", "pth"]), place()]),
    ("Life.Illness", [role("Victim", ["per", "aml"]), role("Disease", ["mhi", "pth"]), place()]),
    ("Life.Infect", [role("InfectingAgent", ["pth", "mhi", "abs", "com"]), role("Victim", ["per", "aml", "com"]),
                     role("Source", ["per", "aml", "com", "nat"]), place()]),
    ("Life.Injure", [role("Victim", ["per", "aml"]), role("Injurer", AGENT),
                     role("Instrument", ["wea", "com", "veh"]), place()]),
    ("Medical.Diagnosis", [role("Treater", ["per", "org"]), role("Patient", ["per", "aml"]),
                           role("MedicalCondition", ["mhi", "pth"]), place()]),
    ("Medical.Intervention", [role("Treater", ["per", "org"]), role("Patient", ["per", "aml"]),
                              role("MedicalIssue", ["mhi", "pth"]), role("Instrument", ["com"]), place()]),
    ("Medical.Vaccinate", [role("Treater", ["per", "org"]), role("Patient", ["per", "aml"]),
                           role("VaccineTarget", ["mhi", "pth"]), role("VaccineMethod", ["com"]), place()]),
    ("Movement", [role("Transporter", ["per", "org", "gpe", "veh"]),
                  role("PassengerArtifact", ["per", "aml", "com", "wea", "veh", "nat", "mon", "inf", "pth"]),
                  role("Vehicle", ["veh"]), role("Origin", PLACE, 0, 1), role("Destination", PLACE, 0, 1)]),
    ("Personnel", [role("Employee", ["per"]), role("PlaceOfEmployment", ["org", "gpe", "fac"]),
                   role("Position", ["ttl"]), place()]),
    ("Transaction.ExchangeBuySell", [role("Giver", AGENT), role("Recipient", AGENT),
                                     role("AcquiredEntity", ["com", "veh", "wea", "fac", "nat", "inf", "aml"]),
                                     role("PaymentBarter", ["mon", "com"]), place()]),
    ("Transaction", [role("Giver", AGENT), role("Recipient", AGENT), role("Beneficiary", AGENT),
                     role("ArtifactMoney", ["com", "mon", "veh", "wea", "fac", "nat", "inf"]), place()]),
]

EVENT_IDS = """
ArtifactExistence.DamageDestroyDisableDismantle.Damage
ArtifactExistence.DamageDestroyDisableDismantle.Destroy
ArtifactExistence.DamageDestroyDisableDismantle.DisableDefuse
ArtifactExistence.DamageDestroyDisableDismantle.Dismantle
ArtifactExistence.DamageDestroyDisableDismantle.Unspecified
ArtifactExistence.ManufactureAssemble.Unspecified
Cognitive.IdentifyCategorize.Unspecified
Cognitive.Inspection.SensoryObserve
Cognitive.Research.Unspecified
Cognitive.TeachingTrainingLearning.Unspecified
Conflict.Attack.DetonateExplode
Conflict.Attack.Unspecified
Conflict.Defeat.Unspecified
Conflict.Demonstrate.DemonstrateWithViolence
Conflict.Demonstrate.Unspecified
Contact.Contact.Broadcast
Contact.Contact.Correspondence
Contact.Contact.Meet
Contact.Contact.Unspecified
Contact.MediaStatement.Broadcast
Contact.MediaStatement.Unspecified
Contact.Prevarication.Broadcast
Contact.Prevarication.Correspondence
Contact.Prevarication.Meet
Contact.Prevarication.Unspecified
Contact.PublicStatementInPerson.Broadcast
Contact.PublicStatementInPerson.Unspecified
Contact.RequestCommand.Broadcast
Contact.RequestCommand.Correspondence
Contact.RequestCommand.Meet
Contact.RequestCommand.Unspecified
Contact.ThreatenCoerce.Broadcast
Contact.ThreatenCoerce.Correspondence
Contact.ThreatenCoerce.Meet
Contact.ThreatenCoerce.Unspecified
Control.ImpedeInterfereWith.Unspecified
Disaster.Crash.Unspecified
Disaster.DiseaseOutbreak.Unspecified
Disaster.FireExplosion.Unspecified
GenericCrime.GenericCrime.GenericCrime
Justice.Acquit.Unspecified
Justice.ArrestJailDetain.Unspecified
Justice.ChargeIndict.Unspecified
Justice.Convict.Unspecified
Justice.InvestigateCrime.Unspecified
Justice.ReleaseParole.Unspecified
Justice.Sentence.Unspecified
Justice.TrialHearing.Unspecified
Life.Consume.Unspecified
Life.Die.Unspecified
Life.Illness.Unspecified
Life.Infect.Unspecified
Life.Injure.IllnessDegradationHungerThirst
Life.Injure.IllnessDegradationPhysical
Life.Injure.Unspecified
Medical.Diagnosis.Unspecified
Medical.Intervention.Unspecified
Medical.Vaccinate.Unspecified
Movement.Transportation.Evacuation
Movement.Transportation.IllegalTransportation
Movement.Transportation.PreventPassage
Movement.Transportation.Unspecified
Personnel.EndPosition.Unspecified
Personnel.StartPosition.Unspecified
Transaction.AidBetweenGovernments.Unspecified
Transaction.Donation.Unspecified
Transaction.ExchangeBuySell.Unspecified
""".split()

RELATIONS = [
    ("Evaluate.Deliberateness.Accidental", AGENT, ["abs", "res"]),
    ("Evaluate.Deliberateness.Deliberate", AGENT, ["abs", "res"]),
    ("Evaluate.Legitimacy.Illegitimate", AGENT, ["abs", "law", "res"]),
    ("Evaluate.Legitimacy.Legitimate", AGENT, ["abs", "law", "res"]),
    ("Evaluate.Sentiment.Negative", AGENT, ["per", "org", "gpe", "abs", "law", "com"]),
    ("Evaluate.Sentiment.Positive", AGENT, ["per", "org", "gpe", "abs", "law", "com"]),
    ("GeneralAffiliation.APORA.Unspecified", ["per", "org", "com", "fac", "veh", "wea"], PLACE),
    ("GeneralAffiliation.MORE.Unspecified", ["per", "org"], ["gpe", "org"]),
    ("GeneralAffiliation.OPRA.Unspecified", ["org"], ["gpe"]),
    ("GeneralAffiliation.OrganizationWebsite.Unspecified", ["org"], ["inf"]),
    ("GeneralAffiliation.PersonAge.Unspecified", ["per"], ["val"]),
    ("GeneralAffiliation.Sponsorship.Unspecified", AGENT, AGENT + ["abs"]),
    ("Information.Color.Unspecified", ["com", "veh", "fac", "aml", "pla"], ["val"]),
    ("Information.Make.Unspecified", ["com", "veh", "wea"], AGENT),
    ("Information.Genre.Unspecified", ["inf", "com"], ["abs"]),
    ("Measurement.Size.Unspecified", ["com", "veh", "fac", "loc", "nat"], ["val"]),
    ("Measurement.Count.Unspecified", ["per", "com", "veh", "wea", "aml"], ["val"]),
    ("Measurement.Weight.Unspecified", ["com", "veh", "aml", "nat"], ["val"]),
    ("OrganizationAffiliation.EmploymentMembership.Unspecified", ["per", "org"], ["org", "gpe"]),
    ("OrganizationAffiliation.Founder.Unspecified", ["per", "org", "gpe"], ["org"]),
    ("OrganizationAffiliation.InvestorShareholder.Unspecified", AGENT, ["org"]),
    ("OrganizationAffiliation.Leadership.Unspecified", ["per"], ["org", "gpe"]),
    ("OrganizationAffiliation.Ownership.Unspecified", AGENT, ["org", "fac", "com", "veh"]),
    ("OrganizationAffiliation.StudentAlum.Unspecified", ["per"], ["org"]),
    ("PartWhole.Membership.Unspecified", ["org", "gpe"], ["org"]),
    ("PartWhole.Subsidiary.Unspecified", ["org"], ["org", "gpe"]),
    ("PartWhole.Geographic.Unspecified", PLACE, PLACE),
    ("PartWhole.Artifact.Unspecified", ["com", "veh", "wea", "fac"], ["com", "veh", "wea", "fac"]),
    ("PersonalSocial.Business.Unspecified", ["per"], ["per"]),
    ("PersonalSocial.Family.Unspecified", ["per"], ["per"]),
    ("PersonalSocial.RoleTitle.Unspecified", ["per"], ["ttl"]),
    ("PersonalSocial.Unspecified.Unspecified", ["per"], ["per"]),
    ("Physical.LocatedNear.Unspecified", ["per", "org", "com", "fac", "veh", "wea", "loc", "gpe"], PLACE),
    ("Physical.OrganizationHeadquarters.Unspecified", ["org"], PLACE),
    ("Physical.OrganizationLocationOrigin.Unspecified", ["org"], PLACE),
    ("Physical.Resident.Unspecified", ["per", "aml"], PLACE),
    ("Responsibility.ClaimResponsibility.Unspecified", AGENT, ["com", "abs", "res", "inf", "fac", "veh", "wea"]),
    ("Responsibility.BlameResponsibility.Unspecified", AGENT, AGENT + ["abs", "res"]),
    ("Medical.Symptom.Unspecified", ["per", "aml"], ["mhi"]),
    ("Medical.Cause.Unspecified", ["pth", "nat", "com"], ["mhi"]),
    ("Medical.Treatment.Unspecified", ["com", "abs"], ["mhi", "pth"]),
    ("Legal.Statute.Unspecified", ["abs", "res"], ["law"]),
    ("Legal.SentenceOf.Unspecified", ["per", "org"], ["sen"]),
    ("Conflict.Sides.Unspecified", AGENT, ["sid"]),
    ("Transaction.Price.Unspecified", ["com", "veh", "fac", "nat"], ["mon"]),
    ("Vote.Ballot.Unspecified", ["per", "org"], ["bal"]),
]


def roles_for(event_id):
    for prefix, roles in ROLES_BY_PREFIX:
        if event_id == prefix or event_id.startswith(prefix + "."):
            return roles
    raise KeyError(event_id)


def label_of(event_id):
    return event_id.split(".")[1] if event_id.endswith("Unspecified") else event_id.split(".")[-1]


def build_ontology():
    assert len(EVENT_IDS) == 67 and len(set(EVENT_IDS)) == 67
    assert len(ENTITIES) == 24 and len(RELATIONS) == 46
    return {
        "format_version": 1,
        "entities": [{"id": k, "label": v} for k, v in ENTITIES.items()],
        "events": [{"id": e, "category": e.split(".")[:2], "label": label_of(e), "roles": roles_for(e)}
                   for e in EVENT_IDS],
        "relations": [{"id": r, "label": r.split(".")[1], "subject_types": sorted(s), "object_types": sorted(o)}
                      for r, s, o in RELATIONS],
    }


def dump(path, obj):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def participant(pid, name, coarse, fine=()):
    return {"id": pid, "name": name, "coarse_types": sorted(coarse), "fine_types": sorted(fine)}


def step(sid, etype, desc, fillers):
    return {"id": sid, "@type": etype, "description": desc, "fillers": fillers}


def schema(sid, name, desc, steps, parts, relations=(), order=None, prov=None):
    return {
        "id": sid, "name": name, "description": desc, "steps": steps, "participants": parts,
        "relations": [{"@type": t, "subject": s, "object": o} for t, s, o in relations],
        "order": order if order is not None else [{"kind": "linear", "members": [s["id"] for s in steps]}],
        "provenance": prov or {"kind": "manual"},
    }


def cook_meal():
    parts = [
        participant("Cook", "Cook", ["per"], ["Q156839"]),
        participant("Grocer", "Grocer", ["per", "org"]),
        participant("Ingredients", "Ingredients", ["com", "nat"]),
        participant("CookingTools", "CookingTools", ["com"]),
        participant("Meal", "Meal", ["com"]),
        participant("Sink", "Sink", ["com", "fac"]),
        participant("Diners", "Diners", ["per"]),
    ]
    steps = [
        step("buy", "Transaction.ExchangeBuySell.Unspecified", "Cook buys Ingredients from Grocer",
             {"Recipient": ["Cook"], "Giver": ["Grocer"], "AcquiredEntity": ["Ingredients"]}),
        step("chop", "ArtifactExistence.DamageDestroyDisableDismantle.Dismantle",
             "Cook chops Ingredients with CookingTools",
             {"Agent": ["Cook"], "Artifact": ["Ingredients"], "Instrument": ["CookingTools"]}),
        step("cook", "ArtifactExistence.ManufactureAssemble.Unspecified", "Cook cooks Meal with CookingTools",
             {"Agent": ["Cook"], "Artifact": ["Meal"], "Instrument": ["CookingTools"]}),
        step("eat", "Life.Consume.Unspecified", "Diners eat Meal",
             {"Consumer": ["Diners"], "ConsumedThing": ["Meal"]}),
        step("wash", "Cognitive.Inspection.SensoryObserve", "Cook washes CookingTools in Sink",
             {"Agent": ["Cook"], "Subject": ["CookingTools"], "Tool": ["Sink"]}),
    ]
    return schema("CookMeal", "Cook Meal", "Someone prepares and serves a meal.", steps, parts,
                  [("Responsibility.ClaimResponsibility.Unspecified", "Cook", "Meal")])


def download_virus():
    parts = [
        participant("Hacker", "Hacker", ["per"]),
        participant("User", "User", ["per"]),
        participant("Virus", "Virus", ["abs", "com"]),
        participant("Computer", "Computer", ["com"]),
    ]
    steps = [
        step("write", "ArtifactExistence.ManufactureAssemble.Unspecified", "Hacker writes Virus",
             {"Agent": ["Hacker"], "Artifact": ["Virus"]}),
        step("download", "Movement.Transportation.Unspecified", "User downloads Virus",
             {"Transporter": ["User"], "PassengerArtifact": ["Virus"]}),
        step("infect", "Life.Infect.Unspecified", "Virus infects Computer",
             {"InfectingAgent": ["Virus"], "Victim": ["Computer"]}),
    ]
    return schema("DownloadComputerVirus", "Download Computer Virus",
                  "A user downloads a virus that infects their computer.", steps, parts)


def remote_teaching():
    parts = [
        participant("Professor", "Professor", ["per"]),
        participant("TA", "TA", ["per"]),
        participant("Students", "Students", ["per"]),
        participant("Class_Topic", "Class Topic", ["abs"]),
        participant("Video_Conference_App", "Video Conference App", ["com", "inf"]),
        participant("University", "University", ["org"]),
    ]
    steps = [
        step("Lecture", "Cognitive.TeachingTrainingLearning.Unspecified",
             "Professor teaches Class Topic to Students over Video Conference App",
             {"Agent": ["Professor"], "Subject": ["Class_Topic"], "Patient": ["Students"],
              "Tool": ["Video_Conference_App"], "Institution": ["University"]}),
        step("Seminar", "Contact.Contact.Unspecified",
             "Professor, TA and Students discuss Class Topic over Video Conference App",
             {"Agent": ["Professor", "TA", "Students"], "Subject": ["Class_Topic"],
              "Tool": ["Video_Conference_App"]}),
    ]
    return schema("Remote_Teaching", "Remote Teaching", "A class is taught remotely.", steps, parts)


def election_dispute():
    """Exclusive branches and a multi-filler slot."""
    parts = [
        participant("State1", "State1", ["gpe"]),
        participant("State2", "State2", ["gpe"]),
        participant("Court", "Court", ["org"]),
        participant("Official", "Official", ["per"]),
        participant("Fraud", "Fraud", ["abs"]),
    ]
    steps = [
        step("aid", "Transaction.AidBetweenGovernments.Unspecified", "State1 and State2 fund Official",
             {"Giver": ["State1", "State2"], "Recipient": ["Official"]}),
        step("charge", "Justice.ChargeIndict.Unspecified", "Court charges Official with Fraud",
             {"Authority": ["Court"], "Defendant": ["Official"], "Crime": ["Fraud"]}),
        step("acquit", "Justice.Acquit.Unspecified", "Court acquits Official",
             {"Authority": ["Court"], "Defendant": ["Official"]}),
        step("convict", "Justice.Convict.Unspecified", "Court convicts Official of Fraud",
             {"Authority": ["Court"], "Defendant": ["Official"], "Crime": ["Fraud"]}),
    ]
    order = [{"kind": "linear", "members": ["aid", "charge", "acquit"]},
             {"kind": "linear", "members": ["charge", "convict"]},
             {"kind": "exclusive_group", "members": ["acquit", "convict"]}]
    return schema("CorruptionTrial", "Corruption Trial", "Foreign-funded official stands trial.", steps, parts,
                  [("GeneralAffiliation.Sponsorship.Unspecified", "State1", "Official")], order)


def type_conflict():
    parts = [participant("Driver", "Driver", ["per"]), participant("Car", "Car", ["veh"])]
    steps = [step("drive", "Movement.Transportation.Unspecified", "Driver drives Car",
                  {"Transporter": ["Driver"], "Vehicle": ["Driver"], "PassengerArtifact": ["Car"]})]
    return schema("TypeConflict", "Type Conflict", "A person used as a vehicle.", steps, parts, order=[])


def ordering_cycle():
    parts = [participant("Suspect", "Suspect", ["per"])]
    steps = [
        step("arrest", "Justice.ArrestJailDetain.Unspecified", "Police arrest Suspect", {"Defendant": ["Suspect"]}),
        step("trial", "Justice.TrialHearing.Unspecified", "Suspect stands trial", {"Defendant": ["Suspect"]}),
        step("release", "Justice.ReleaseParole.Unspecified", "Suspect is released", {"Defendant": ["Suspect"]}),
    ]
    order = [{"kind": "linear", "members": ["arrest", "trial", "release"]},
             {"kind": "linear", "members": ["release", "arrest"]}]
    return schema("OrderingCycle", "Ordering Cycle", "Steps that precede themselves.", steps, parts, order=order)


EXTRACTOR_EXCERPT = """{ "@id": "K0C03N60D.7.2",
  "@type": "kairos:Primitives/Events/Movement.Transportation.Unspecified",
  "confidence": 0.9,
  "participants": [
    { "@id": "K0C03N60D.7.2.P1.1",
      "role": "kairos:Primitives/Events/Movement.Transportation.Unspecified/Slots/Destination",
      "values": [{ "confidence": 1.0,
                   "entity": "e2323a3", }]},
    { "@id": "K0C03N60D.7.2.P3.1",
      "role": "kairos:Primitives/Events/Movement.Transportation.Unspecified/Slots/PassengerArtifact",
      "values": [{ "confidence": 0.8,
                   "entity": "e2323a1", }]}
  ],
}
"""


def ev(eid, etype, fillers, conf=1.0):
    return {"@id": eid, "@type": etype, "confidence": conf,
            "participants": [{"@id": f"{eid}.{r}", "role": r,
                              "values": [{"entity": e, "confidence": 1.0} for e in ents]}
                             for r, ents in fillers.items()]}


def remote_teaching_doc():
    return {"@id": "remote_teaching_doc", "events": [
        ev("lec1", "Cognitive.TeachingTrainingLearning.Unspecified",
           {"Agent": ["prof"], "Subject": ["topic"], "Patient": ["students"], "Tool": ["zoom"],
            "Institution": ["univ"]}),
        ev("sem1", "Contact.Contact.Unspecified",
           {"Agent": ["prof", "ta", "students"], "Subject": ["topic"], "Tool": ["zoom"]}),
    ]}


# Hand-countable corpus in a FrameNet-like source vocabulary.
SMALL_MAPPING = {"rules": [
    {"source": "fn:Attack", "target": "Conflict.Attack.Unspecified",
     "roles": {"Assailant": "Attacker", "Victim": "Target"}},
    {"source": "fn:Killing", "target": "Life.Die.Unspecified", "roles": {"Victim": "Victim", "Killer": "Killer"}},
    {"source": "fn:Arrest", "target": "Justice.ArrestJailDetain.Unspecified", "roles": {"Suspect": "Defendant"}},
    {"source": "fn:Trial", "target": "Justice.TrialHearing.Unspecified", "roles": {"Defendant": "Defendant"}},
    {"source": "fn:Travel", "target": "Movement.Transportation.Unspecified",
     "roles": {"Traveler": "PassengerArtifact", "Goal": "Destination"}},
    {"source": "fn:Arriving", "target": "Movement.Transportation.Unspecified",
     "roles": {"Theme": "PassengerArtifact", "Goal": "Destination"}},
    {"source": "fn:Cure", "target": "Medical.Intervention.Unspecified", "roles": {"Patient": "Patient"}},
]}


def small_corpus():
    A, K, R, T = "fn:Attack", "fn:Killing", "fn:Arrest", "fn:Trial"
    docs = {
        "d01": [ev("d01.1", A, {"Assailant": ["x1"], "Victim": ["x2"]}),
                ev("d01.2", K, {"Victim": ["x2"], "Killer": ["x1"]}),
                ev("d01.3", R, {"Suspect": ["x1"]})],
        "d02": [ev("d02.1", A, {"Assailant": ["y1"], "Victim": ["y2"]}),
                ev("d02.2", K, {"Victim": ["y2"], "Killer": ["y1"]}),
                ev("d02.3", R, {"Suspect": ["y1"]})],
        "d03": [ev("d03.1", A, {"Assailant": ["z1"], "Victim": ["z2"]}),
                ev("d03.2", K, {"Victim": ["z2"]})],
        "d04": [ev("d04.1", R, {"Suspect": ["w1"]}), ev("d04.2", T, {"Defendant": ["w1"]})],
        "d05": [ev("d05.1", R, {"Suspect": ["v1"]}), ev("d05.2", T, {"Defendant": ["v1"]}),
                ev("d05.3", A, {"Assailant": ["v1"], "Victim": ["v2"]})],
        "d06": [ev("d06.1", "fn:Travel", {"Traveler": ["u1"], "Goal": ["u2"]}),
                ev("d06.2", "fn:Weather", {"Place": ["u2"]})],
        "d07": [ev("d07.1", "fn:Travel", {"Traveler": ["t1"]}), ev("d07.2", "fn:Arriving", {"Theme": ["t1"]})],
        "d08": [ev("d08.1", "fn:Cure", {"Patient": ["s1"]})],
        "d09": [],
        "d10": [ev("d10.1", A, {"Assailant": ["r1"], "Victim": ["r2"]}), ev("d10.2", K, {"Victim": ["r2"]}),
                ev("d10.3", R, {"Suspect": ["r1"]}), ev("d10.4", T, {"Defendant": ["r1"]})],
    }
    return docs


# Scenario scripts for the synthetic pipeline corpus: (id, protagonist role per event).
SCENARIOS = {
    "scn_outbreak": [("Life.Infect.Unspecified", "Victim"), ("Life.Illness.Unspecified", "Victim"),
                     ("Medical.Diagnosis.Unspecified", "Patient"), ("Medical.Intervention.Unspecified", "Patient"),
                     ("Life.Die.Unspecified", "Victim")],
    "scn_vaccination": [("Disaster.DiseaseOutbreak.Unspecified", "Victim"),
                        ("Movement.Transportation.Unspecified", "PassengerArtifact"),
                        ("Medical.Vaccinate.Unspecified", "Patient"),
                        ("Contact.PublicStatementInPerson.Unspecified", "Subject")],
    "scn_bombing": [("Transaction.ExchangeBuySell.Unspecified", "Recipient"),
                    ("ArtifactExistence.ManufactureAssemble.Unspecified", "Agent"),
                    ("Conflict.Attack.DetonateExplode", "Attacker"),
                    ("Justice.ArrestJailDetain.Unspecified", "Defendant")],
    "scn_trial": [("Justice.InvestigateCrime.Unspecified", "Defendant"),
                  ("Justice.ArrestJailDetain.Unspecified", "Defendant"),
                  ("Justice.ChargeIndict.Unspecified", "Defendant"),
                  ("Justice.TrialHearing.Unspecified", "Defendant"),
                  ("Justice.Convict.Unspecified", "Defendant"),
                  ("Justice.Sentence.Unspecified", "Defendant")],
    "scn_protest": [("Contact.MediaStatement.Unspecified", "Agent"),
                    ("Conflict.Demonstrate.Unspecified", "Demonstrator"),
                    ("Conflict.Demonstrate.DemonstrateWithViolence", "Demonstrator"),
                    ("Justice.ArrestJailDetain.Unspecified", "Defendant")],
    "scn_hiring": [("Contact.Contact.Meet", "Agent"), ("Personnel.StartPosition.Unspecified", "Employee"),
                   ("Transaction.ExchangeBuySell.Unspecified", "Recipient"),
                   ("Personnel.EndPosition.Unspecified", "Employee")],
    "scn_evacuation": [("Disaster.FireExplosion.Unspecified", "Victim"),
                       ("Movement.Transportation.Evacuation", "PassengerArtifact"),
                       ("Life.Injure.Unspecified", "Victim"),
                       ("Transaction.Donation.Unspecified", "Recipient")],
    "scn_smuggling": [("Transaction.ExchangeBuySell.Unspecified", "Giver"),
                      ("Movement.Transportation.IllegalTransportation", "Transporter"),
                      ("Movement.Transportation.PreventPassage", "Transporter"),
                      ("Justice.ArrestJailDetain.Unspecified", "Defendant")],
}


def role_types(etype, rname):
    for r in roles_for(etype):
        if r["name"] == rname:
            return r["types"]
    raise KeyError((etype, rname))


def scenario_schema(sid, script):
    steps, parts = [], []
    protagonist_types = set.intersection(*[set(role_types(e, r)) for e, r in script]) or {"per"}
    ptype = "per" if "per" in protagonist_types else sorted(protagonist_types)[0]
    parts.append(participant("Protagonist", "Protagonist", [ptype]))
    for i, (etype, r) in enumerate(script, 1):
        fillers = {}
        if ptype in role_types(etype, r):
            fillers[r] = ["Protagonist"]
        steps.append(step(f"s{i}", etype, f"Protagonist {label_of(etype).lower()}", fillers))
    used = {p for s in steps for ids in s["fillers"].values() for p in ids}
    parts = [p for p in parts if p["id"] in used]
    return schema(sid, sid[4:].capitalize(), f"Synthetic {sid[4:]} scenario.", steps, parts)


def synthetic_corpus(rng, n_docs):
    docs, gold = [], []
    names = sorted(SCENARIOS)
    for d in range(n_docs):
        scn = names[d % len(names)]
        script = SCENARIOS[scn]
        did = f"syn{d:04d}"
        keep = [x for x in script if rng.random() < 0.8] or [script[0]]
        events = []
        hero = f"{did}.e0"
        for k, (etype, r) in enumerate(keep):
            fillers = {r: [hero]}
            events.append(ev(f"{did}.{k}", etype, fillers, conf=round(rng.uniform(0.85, 1.0), 2)))
        for k in range(rng.randrange(0, 3)):
            etype = rng.choice(EVENT_IDS)
            r = roles_for(etype)[0]["name"]
            events.append(ev(f"{did}.n{k}", etype, {r: [f"{did}.e{k + 1}"]}, conf=0.5))
        docs.append({"@id": did, "events": events})
        gold.append((did, scn))
    return docs, gold


NAME_POOL = {
    "per": ["Doctor", "Patient", "Official", "Suspect", "Reporter", "Soldier", "Teacher", "Worker", "Leader",
            "Witness", "Driver", "Nurse", "Judge", "Farmer", "Merchant", "Student"],
    "org": ["Agency", "Company", "Hospital", "Police", "Ministry", "Charity", "Militia", "School"],
    "gpe": ["Country", "City", "Province", "Region"],
    "loc": ["Border", "Field", "Coast", "Road"],
    "fac": ["Building", "Airport", "Prison", "Clinic", "Factory", "Bridge"],
    "com": ["Goods", "Device", "Medicine", "Package", "Tools", "Supplies"],
    "veh": ["Truck", "Plane", "Boat", "Car"],
    "wea": ["Bomb", "Rifle", "Explosive"],
}


def random_schema(rng, ontology, idx):
    events = ontology["events"]
    cats = sorted({e["category"][0] for e in events})
    pool = []
    while len(pool) < 3:
        pick = rng.sample(cats, 2)
        pool = [e for e in events if e["category"][0] in pick]
    n = rng.randint(3, min(8, len(pool)))
    chosen = rng.sample(pool, n)
    parts, steps, used_names = [], [], set()

    def new_participant(types):
        usable = [t for t in types if t in NAME_POOL] or types
        t = rng.choice(usable)
        base = rng.choice(NAME_POOL.get(t, [ENTITIES[t].title().replace(" ", "")]))
        name, k = base, 2
        while name in used_names:
            name, k = f"{base}{k}", k + 1
        used_names.add(name)
        p = participant(f"p{len(parts) + 1}", name, [t])
        parts.append(p)
        return p

    for i, e in enumerate(chosen, 1):
        roles = [r for r in e["roles"] if r["name"] != "Place"]
        take = rng.sample(roles, min(len(roles), rng.randint(1, 3)))
        fillers, names_in_step = {}, []
        for r in take:
            fits = [p for p in parts if set(p["coarse_types"]) & set(r["types"])]
            p = rng.choice(fits) if fits and rng.random() < 0.6 else new_participant(r["types"])
            if p["id"] in [x for ids in fillers.values() for x in ids]:
                continue
            fillers[r["name"]] = [p["id"]]
            names_in_step.append(p["name"])
        verb = e["label"].lower()
        desc = f"{names_in_step[0]} {verb}" + (f" {' and '.join(names_in_step[1:])}" if len(names_in_step) > 1 else "")
        steps.append(step(f"s{i}", e["id"], desc, fillers))
    order = [{"kind": "linear", "members": [s["id"] for s in steps]}]
    if len(steps) >= 4 and rng.random() < 0.15:
        order.append({"kind": "exclusive_group", "members": [steps[-2]["id"], steps[-1]["id"]]})
    rels = []
    if len(parts) >= 2 and rng.random() < 0.4:
        a, b = rng.sample(parts, 2)
        for rid, st, ot in RELATIONS:
            if set(a["coarse_types"]) & set(st) and set(b["coarse_types"]) & set(ot):
                rels.append((rid, a["id"], b["id"]))
                break
    prov = {"kind": "skeleton_fleshed", "skeleton": f"sk{idx:05d}"} if rng.random() < 0.5 else None
    return schema(f"lib{idx:03d}", f"Library schema {idx}", "Generated library schema.", steps, parts, rels,
                  order, prov)


def main():
    if os.path.isdir(ROOT):
        shutil.rmtree(ROOT)
    rng = random.Random(20220620)
    onto = build_ontology()
    dump(os.path.join(ROOT, "ontology.json"), onto)

    hand_written = [cook_meal(), download_virus(), remote_teaching(), election_dispute()]
    for s in hand_written:
        dump(os.path.join(ROOT, "schemas", s["id"] + ".json"), s)
    dump(os.path.join(ROOT, "invalid", "type_conflict.json"), type_conflict())
    dump(os.path.join(ROOT, "invalid", "ordering_cycle.json"), ordering_cycle())

    os.makedirs(os.path.join(ROOT, "documents"), exist_ok=True)
    with open(os.path.join(ROOT, "documents", "extractor_excerpt.json"), "w") as f:
        f.write(EXTRACTOR_EXCERPT)
    dump(os.path.join(ROOT, "documents", "remote_teaching_doc.json"), remote_teaching_doc())

    for did, events in small_corpus().items():
        dump(os.path.join(ROOT, "small_corpus", "docs", did + ".json"), {"@id": did, "events": events})
    dump(os.path.join(ROOT, "small_corpus", "mapping.json"), SMALL_MAPPING)

    scenario_schemas = [scenario_schema(sid, script) for sid, script in sorted(SCENARIOS.items())]
    docs, gold = synthetic_corpus(rng, 400)
    os.makedirs(os.path.join(ROOT, "synthetic"), exist_ok=True)
    with open(os.path.join(ROOT, "synthetic", "corpus.jsonl"), "w") as f:
        for d in docs:
            f.write(json.dumps(d, sort_keys=True) + "\n")
    with open(os.path.join(ROOT, "synthetic", "gold.tsv"), "w") as f:
        for did, scn in gold:
            f.write(f"{did}\t{scn}\n")
    for s in scenario_schemas:
        dump(os.path.join(ROOT, "synthetic", "library", s["id"] + ".json"), s)

    library = hand_written + scenario_schemas
    idx = 1
    while len(library) < 232:
        library.append(random_schema(rng, onto, idx))
        idx += 1
    for s in library:
        dump(os.path.join(ROOT, "library", s["id"] + ".json"), s)
    print(f"wrote fixtures to {os.path.normpath(ROOT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
