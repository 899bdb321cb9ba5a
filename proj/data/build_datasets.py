#!/usr/bin/env python3
"""Regenerates the bundled scenario, curve and cost files.

Published numbers are copied verbatim. Everything else is derived from them
with the rules below and tagged "reconstructed" (or "assumed" where the
component price itself was an assumption of the source study).

Usage: python3 data/build_datasets.py   (writes next to this script)
"""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent
FORMAT_VERSION = 1

# Households in the pure residential Munich area; the curve tables give
# connected households x 100.
HOUSEHOLDS = 29262

CURVES = {
    "Conservative": [9600, 12800, 17200, 23300, 31800, 43500, 59400, 81300, 110900, 150900, 204400,
                     275100, 367200, 484900, 631100, 806800, 1008700, 1228700, 1453500, 1667400, 1855900],
    "Realistic": [9600, 13200, 18300, 25700, 36300, 51400, 72700, 102700, 144600, 202800, 282200,
                  388700, 528100, 704200, 916600, 1158000, 1412600, 1658200, 1873000, 2043100, 2165800],
    "Aggressive": [9600, 17900, 34200, 66100, 128400, 247300, 466000, 837300, 1376000, 1951700, 2297300,
                   2371300, 2374700, 2375300, 2375600, 2375800, 2375900, 2375900, 2376000, 2376000, 2376000],
}

CAPEX_KEYS = ["civil_works", "fiber", "central_office", "remote_nodes", "buildings"]
OPEX_KEYS = ["rent", "energy", "fault_management", "marketing", "operations"]

# Residential per-subscriber CAPEX and OPEX categories, published for the six
# 100 Mbps deployments (OASE component prices).
RES_CAPEX = {
    "FTTH_UDWDM_100": [2.695375796, 0.000499355, 1.422214248, 0.373180234, 5.433668239],
    "FTTB_UDWDM_100": [2.695375796, 0.000499355, 0.398617092, 0.106622924, 4.203403732],
    "FTTH_XGPON_100": [5.000952574, 0.000437926, 0.683844804, 0.273774862, 5.221058027],
    "FTTB_XGPON_100": [5.000952574, 0.000437926, 0.352766956, 0.068443715, 1.966666667],
    "FTTH_HPON_100": [3.948139877, 0.000353074, 0.483904039, 0.013156995, 3.690793521],
    "FTTB_HPON_100": [3.948139877, 0.000325065, 0.483904039, 0.015942178, 2.272571936],
}
RES_OPEX = {
    "FTTH_UDWDM_100": [0.278783405, 0.055152974, 0.078644922, 0.020629065, 0.028880691],
    "FTTB_UDWDM_100": [0.37485066, 0.251807341, 0.104933924, 0.036579596, 0.051211435],
    "FTTH_XGPON_100": [0.280956872, 0.041872692, 0.07915256, 0.020099106, 0.028138749],
    "FTTB_XGPON_100": [0.247557925, 0.268193947, 0.105191198, 0.031047153, 0.043466015],
    "FTTH_HPON_100": [0.321419589, 0.028738979, 0.285786154, 0.031797236, 0.04451613],
    "FTTB_HPON_100": [0.321419589, 0.25604634, 0.106279663, 0.03418728, 0.047862191],
}

# Converged per-subscriber CAPEX totals per study, published for the same six.
STUDIES = ["OASE", "Phillipson", "Rokkas", "BSG"]
CONV_TOTAL = {
    "FTTH_UDWDM_100": [10.54204918, 10.46278276, 13.697269, 22.48767615],
    "FTTB_UDWDM_100": [7.79042933, 7.771715851, 8.742993833, 20.03616907],
    "FTTH_XGPON_100": [11.14275616, 11.73731371, 13.8996779, 23.33404265],
    "FTTB_XGPON_100": [8.241167069, 9.168965683, 7.94916187, 18.30178238],
    "FTTH_HPON_100": [11.62945519, 11.87101078, 12.23929349, 16.59155403],
    "FTTB_HPON_100": [7.138114882, 5.736204034, 7.211441176, 16.26313592],
}

# Per-unit component prices per study (C.U.); True marks prices the source
# study did not give and were assumed from model trends.
COMPONENTS = {
    "fiber_duct": ([1.12, 0.54, 0.7, 1.42], [False, False, False, False]),
    "gpon_olt": ([40, 50, 70, 288], [False, False, False, False]),
    "xgpon_olt": ([80, 55, 200, 300], [False, True, False, True]),
    "wdm_olt_port": ([8.8, 60, 200, 350], [False, True, False, True]),
    "dslam_cabinet": ([124, 220, 300, 294], [False, False, False, False]),
    "gpon_onu": ([1, 5, 2, 1.6], [False, False, False, False]),
    "xgpon_onu": ([1.8, 5, 4, 1.8], [False, True, False, True]),
}

TECHNOLOGIES = [
    # id, architecture, family, rate, stages
    ("ADSL", "ADSL", "Copper", 20, 1),
    ("FTTCab_GPON_25", "FTTCab", "GPON", 25, 2),
    ("FTTB_GPON_25", "FTTB", "GPON", 25, 2),
    ("FTTCab_XGPON_50", "FTTCab", "XGPON", 50, 2),
    ("FTTB_GPON_50", "FTTB", "GPON", 50, 2),
    ("FTTB_XGPON_50", "FTTB", "XGPON", 50, 2),
    ("FTTB_UDWDM_50", "FTTB", "UDWDM", 50, 1),
    ("FTTB_HPON_50", "FTTB", "HPON", 50, 2),
    ("FTTB_XGPON_100", "FTTB", "XGPON", 100, 2),
    ("FTTH_XGPON_100", "FTTH", "XGPON", 100, 2),
    ("FTTB_UDWDM_100", "FTTB", "UDWDM", 100, 1),
    ("FTTH_UDWDM_100", "FTTH", "UDWDM", 100, 1),
    ("FTTB_HPON_100", "FTTB", "HPON", 100, 2),
    ("FTTH_HPON_100", "FTTH", "HPON", 100, 2),
]

EDGES = (
    [("ADSL", t[0]) for t in TECHNOLOGIES[1:]]
    + [("FTTCab_GPON_25", t) for t in ["FTTCab_XGPON_50", "FTTB_GPON_50", "FTTB_XGPON_50", "FTTB_XGPON_100",
                                       "FTTH_XGPON_100", "FTTB_HPON_100", "FTTH_HPON_100"]]
    + [("FTTB_GPON_25", t) for t in ["FTTB_GPON_50", "FTTB_XGPON_50", "FTTB_XGPON_100", "FTTH_XGPON_100"]]
    + [(s, t) for s in ["FTTCab_XGPON_50", "FTTB_GPON_50", "FTTB_XGPON_50"]
       for t in ["FTTB_XGPON_100", "FTTH_XGPON_100"]]
    + [("FTTB_UDWDM_50", t) for t in ["FTTB_UDWDM_100", "FTTH_UDWDM_100"]]
    + [("FTTB_HPON_50", t) for t in ["FTTB_HPON_100", "FTTH_HPON_100"]]
)

TARIFFS = {
    "Residential": {"20": "3.6", "25": "7.2", "50": "10.8", "100": "13.2"},
    "Business": {"20": "3.6", "25": "36", "50": "84", "100": "110"},
    "ITS": {"20": "0", "25": "0", "50": "84", "100": "110"},
}

# Intermediate deployments, derived from a published 100 Mbps parent.
# 50 Mbps: same fiber plant and remote nodes, half the OLT capacity and a
# lower-rate ONU. GPON variants price OLT and ONU at the GPON/XGPON ratio.
# FTTCab: fiber to the street cabinet only; the cabinet (with its VDSL
# DSLAM) is the remote node and there is no in-building equipment.
DERIVED = {
    # id: (parent, civil, co, rn, buildings, opex)
    "FTTB_UDWDM_50": ("FTTB_UDWDM_100", 1.0, 0.5, 1.0, "onu_50", 0.9),
    "FTTB_HPON_50": ("FTTB_HPON_100", 1.0, 0.5, 1.0, "onu_50", 0.9),
    "FTTB_XGPON_50": ("FTTB_XGPON_100", 1.0, 0.5, 1.0, "onu_50", 0.9),
    "FTTB_GPON_50": ("FTTB_XGPON_100", 1.0, "gpon_50", 1.0, "gpon_onu_50", 0.9),
    "FTTB_GPON_25": ("FTTB_XGPON_100", 1.0, "gpon_25", 1.0, "gpon_onu_25", 0.85),
    "FTTCab_XGPON_50": ("FTTB_XGPON_100", "cab", 0.5, "cab", 0.0, "cab"),
    "FTTCab_GPON_25": ("FTTB_XGPON_100", "cab", "gpon_25", "cab", 0.0, "cab"),
}

ONU_50_SHARE = 0.6          # 50 Mbps ONU price relative to the 100 Mbps one
CABINET_DUCT_SHARE = 0.45   # feeder duct to the cabinets vs. to every building
HOUSEHOLDS_PER_CABINET = 96
CABINET_OPEX = 0.85         # per subscriber, cabinet power and site rent
CONVERGED_OPEX_FACTOR = 1.07


def money(x):
    return format(float(x), ".12g")


def ratio(component, study):
    prices = COMPONENTS[component][0]
    return prices[study] / prices[0]


def assumed(component, study):
    return COMPONENTS[component][1][study]


def derive_residential():
    """Residential OASE per-subscriber records for all 13 deployments."""
    out = {}
    for tid in RES_CAPEX:
        out[tid] = {
            "capex": dict(zip(CAPEX_KEYS, RES_CAPEX[tid])),
            "opex": dict(zip(OPEX_KEYS, RES_OPEX[tid])),
            "provenance": "published residential per-subscriber categories",
        }
    gpon_olt = COMPONENTS["gpon_olt"][0][0] / COMPONENTS["xgpon_olt"][0][0]
    gpon_onu = COMPONENTS["gpon_onu"][0][0] / COMPONENTS["xgpon_onu"][0][0]
    for tid, (parent, civil, co, rn, bld, opx) in DERIVED.items():
        p = out[parent]
        c = dict(p["capex"])
        if civil == "cab":
            c["civil_works"] = p["capex"]["civil_works"] * CABINET_DUCT_SHARE
        co_factor = {"gpon_50": gpon_olt * 0.5, "gpon_25": gpon_olt * 0.25}.get(co, co)
        c["central_office"] = p["capex"]["central_office"] * co_factor
        if rn == "cab":
            c["remote_nodes"] = COMPONENTS["dslam_cabinet"][0][0] / HOUSEHOLDS_PER_CABINET
        bld_factor = {"onu_50": ONU_50_SHARE, "gpon_onu_50": gpon_onu * ONU_50_SHARE,
                      "gpon_onu_25": gpon_onu * ONU_50_SHARE * 0.5}.get(bld, bld)
        c["buildings"] = p["capex"]["buildings"] * bld_factor
        if opx == "cab":
            base = sum(p["opex"].values())
            o = {k: v / base * CABINET_OPEX for k, v in p["opex"].items()}
        else:
            o = {k: v * opx for k, v in p["opex"].items()}
        out[tid] = {"capex": c, "opex": o, "provenance": "reconstructed from " + parent + " and component prices"}
    return out


def converged_from_residential(res, study):
    """Converged records for one study.

    OASE: residential categories scaled so the six published deployments hit
    the published converged totals; intermediates use the mean scale of their
    family. Other studies: civil works follow the duct price ratio,
    equipment is scaled so the published totals are met, intermediates use
    the equipment scale of their family and the cabinet price ratio.
    """
    out = {}
    oase_scale = {}
    for tid, totals in CONV_TOTAL.items():
        oase_scale[tid] = totals[0] / sum(res[tid]["capex"].values())
    family_scale = {}
    for fam in ["UDWDM", "XGPON", "HPON"]:
        vals = [oase_scale[t] for t in oase_scale if ("_" + fam + "_") in t]
        family_scale[fam] = sum(vals) / len(vals)
    family_scale["GPON"] = family_scale["XGPON"]

    def family(tid):
        return tid.split("_")[1]

    oase = {}
    for tid, rec in res.items():
        s = oase_scale.get(tid, family_scale[family(tid)])
        oase[tid] = {k: v * s for k, v in rec["capex"].items()}
    if study == 0:
        for tid, rec in res.items():
            out[tid] = {
                "capex": oase[tid],
                "opex": {k: v * CONVERGED_OPEX_FACTOR for k, v in rec["opex"].items()},
                "provenance": ("published converged total, categories scaled from residential"
                               if tid in CONV_TOTAL else "reconstructed, family scale of published totals"),
            }
        return out

    duct = ratio("fiber_duct", study)
    equip_scale = {}
    for tid, totals in CONV_TOTAL.items():
        civil = oase[tid]["civil_works"] * duct
        equip_oase = sum(v for k, v in oase[tid].items() if k != "civil_works")
        equip_scale[tid] = (totals[study] - civil) / equip_oase
    fam_equip = {}
    for fam in ["UDWDM", "XGPON", "HPON"]:
        vals = [equip_scale[t] for t in equip_scale if ("_" + fam + "_") in t]
        fam_equip[fam] = sum(vals) / len(vals)
    fam_equip["GPON"] = fam_equip["XGPON"] * ratio("gpon_olt", study) / ratio("xgpon_olt", study)
    for tid, rec in res.items():
        c = dict(oase[tid])
        c["civil_works"] = oase[tid]["civil_works"] * duct
        s = equip_scale.get(tid, fam_equip[family(tid)])
        for k in CAPEX_KEYS[1:]:
            c[k] = oase[tid][k] * s
        is_assumed = False
        if tid.startswith("FTTCab"):
            c["remote_nodes"] = oase[tid]["remote_nodes"] * ratio("dslam_cabinet", study)
        fam = family(tid)
        comp = {"GPON": "gpon_olt", "XGPON": "xgpon_olt", "UDWDM": "wdm_olt_port", "HPON": "wdm_olt_port"}[fam]
        is_assumed = assumed(comp, study)
        out[tid] = {
            "capex": c,
            "opex": {k: v * CONVERGED_OPEX_FACTOR for k, v in rec["opex"].items()},
            "provenance": ("published converged total, civil works by duct price ratio"
                           if tid in CONV_TOTAL else "reconstructed from component price ratios"),
        }
        if is_assumed:
            out[tid]["assumed"] = True
    return out


def cost_document(name, records, unit="per_subscriber_passed"):
    recs = {}
    for tid in sorted(records):
        r = records[tid]
        entry = {
            "capex": {k: money(r["capex"][k]) for k in CAPEX_KEYS},
            "opex": {k: money(r["opex"][k]) for k in OPEX_KEYS},
        }
        if r.get("assumed"):
            entry["assumed"] = True
        entry["provenance"] = r["provenance"]
        recs[tid] = entry
    return {
        "format_version": FORMAT_VERSION,
        "name": name,
        "unit": unit,
        "opex_mode": "table",
        "adsl_opex_per_subscriber": "0.25",
        "records": recs,
    }


def curve_document(label, counts):
    return {
        "format_version": FORMAT_VERSION,
        "label": label,
        "provenance": "published connected-household series, divided by 100 x " + str(HOUSEHOLDS),
        "values": {str(2018 + i): money(v / (100 * HOUSEHOLDS)) for i, v in enumerate(counts)},
    }


def munich_scenario(name, demands, costs_ref, cost_library):
    return {
        "format_version": FORMAT_VERSION,
        "name": name,
        "start": "ADSL",
        "technologies": [
            {"id": t[0], "architecture": t[1], "family": t[2], "data_rate": t[3], "stages": t[4],
             "provenance": "published deployment list" if t[0] in RES_CAPEX or t[0] == "ADSL"
             else "reconstructed intermediate deployment"}
            for t in TECHNOLOGIES
        ],
        "edges": [{"from": a, "to": b, "provenance": "reconstructed migration matrix"} for a, b in EDGES],
        "tariffs": TARIFFS,
        "curve": {"ref": "realistic"},
        "curve_library": {
            "conservative": "../curves/conservative.json",
            "realistic": "../curves/realistic.json",
            "aggressive": "../curves/aggressive.json",
        },
        "demands": demands,
        "churn": {"churn_rate": "0.1", "churn_probability": "0.1", "its_exempt": True},
        "costs_ref": costs_ref,
        "cost_library": cost_library,
        "horizon": {"T_start": 2018, "T_mig": 10, "T_NW": 20},
        "discount_rate": "0.1",
        "goal": {"policy": "FlexibleFTTx", "rate": 100, "fixed_waypoints": False},
        "family_rule": True,
        "capex_discounting": "none",
    }


def toy_scenario():
    curve = [0.1, 0.16, 0.256, 0.4096, 0.65536, 1.0]
    return {
        "format_version": FORMAT_VERSION,
        "name": "toy",
        "start": "ADSL",
        "technologies": [
            {"id": "ADSL", "architecture": "ADSL", "family": "Copper", "data_rate": 20, "stages": 1,
             "provenance": "published toy example"},
            {"id": "FTTCab_GPON_25", "architecture": "FTTCab", "family": "GPON", "data_rate": 25, "stages": 2,
             "label": "PON1", "provenance": "published toy example, intermediate rate"},
            {"id": "FTTB_XGPON_100", "architecture": "FTTB", "family": "XGPON", "data_rate": 100, "stages": 2,
             "label": "PON2", "provenance": "published toy example, goal rate"},
        ],
        "edges": [
            {"from": "ADSL", "to": "FTTCab_GPON_25", "provenance": "published toy example"},
            {"from": "ADSL", "to": "FTTB_XGPON_100", "provenance": "published toy example"},
            {"from": "FTTCab_GPON_25", "to": "FTTB_XGPON_100", "provenance": "published toy example"},
        ],
        "tariffs": {"Residential": {"20": "3.6", "25": "7.2", "100": "13.2"}},
        "curve": {"label": "Custom", "values": {str(2018 + i): money(v) for i, v in enumerate(curve)}},
        "demands": {"label": "PureResidential", "counts": {"Residential": 40}},
        "churn": {"churn_rate": "0.1", "churn_probability": "0.1", "its_exempt": True},
        "costs": {
            "format_version": FORMAT_VERSION,
            "name": "toy",
            "unit": "absolute",
            "opex_mode": "table",
            "adsl_opex_per_subscriber": "0.25",
            "records": {
                "FTTB_XGPON_100": {
                    "capex": {"civil_works": "250", "fiber": "0", "central_office": "0", "remote_nodes": "0",
                              "buildings": "250"},
                    "opex": {"rent": "0.7", "energy": "0", "fault_management": "0", "marketing": "0",
                             "operations": "0"},
                    "provenance": "calibrated, the published toy cost matrix is incomplete",
                },
                "FTTCab_GPON_25": {
                    "capex": {"civil_works": "50", "fiber": "0", "central_office": "0", "remote_nodes": "0",
                              "buildings": "50"},
                    "opex": {"rent": "0.5", "energy": "0", "fault_management": "0", "marketing": "0",
                             "operations": "0"},
                    "provenance": "calibrated, the published toy cost matrix is incomplete",
                },
            },
        },
        "horizon": {"T_start": 2018, "T_mig": 3, "T_NW": 5},
        "discount_rate": "0.1",
        "goal": {"policy": "FlexibleFTTx", "rate": 100},
        "family_rule": True,
        "capex_discounting": "decision_year",
    }


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def main():
    for label, counts in CURVES.items():
        write(HERE / "curves" / (label.lower() + ".json"), curve_document(label, counts))

    res = derive_residential()
    write(HERE / "costs" / "residential_oase.json", cost_document("OASE residential", res))
    converged_lib = {}
    for i, study in enumerate(STUDIES):
        fname = "converged_" + study.lower() + ".json"
        write(HERE / "costs" / fname, cost_document(study + " converged", converged_from_residential(res, i)))
        converged_lib[study.lower()] = "../costs/" + fname

    write(HERE / "scenarios" / "munich_residential.json",
          munich_scenario("munich_residential",
                          {"label": "PureResidential", "counts": {"Residential": HOUSEHOLDS}},
                          "oase", {"oase": "../costs/residential_oase.json"}))
    write(HERE / "scenarios" / "munich_converged.json",
          munich_scenario("munich_converged",
                          {"label": "Converged", "counts": {"Residential": 27213, "Business": 2049, "ITS": 2}},
                          "oase", converged_lib))
    write(HERE / "scenarios" / "toy.json", toy_scenario())


if __name__ == "__main__":
    main()
