"""Regenerate the bundled GreenLab Skive dataset.

    python -m hubopt.data.build_gls [target_dir]

``REFERENCE_ROWS`` are the documented GreenLab Skive parameter values.
``SUPPLEMENT_ROWS`` fill what the reference rows leave out (connectivity,
the elided size variants, MeOH/NH3/ASU stoichiometry, PPA wind, activation
flags); every supplement value is an engineering estimate. The hourly series
are synthetic stand-ins for the DK1 2019 day-ahead price and the local
PV/wind profiles, drawn from a fixed seed.
"""

from __future__ import annotations

import csv
import sys
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from hubopt.model.io import HEADER

ISC = "Inv-storage-compress"
TECH = "Tech-H2-units"
MEOH_BIN = "Inv-MeOH-bin"
NH3_BIN = "Inv-NH3-bin"

LAYERS = [
    "Base", "Inv", TECH, "Inv-H2-on", "Inv-H2-int", "Inv-H2-cont",
    "Inv-MeOH-on", MEOH_BIN, "Inv-MeOH-cont", "Inv-NH3-on", NH3_BIN, "Inv-NH3-cont",
    "Inv-PPA", ISC, "Mod-UC", "Premium-1.5x", "Premium-2x", "Solver-Gurobi", "Year",
]

INT = "unit_investment_variable_type_integer"
CONT = "unit_investment_variable_type_continuous"
PRICE = "ts:dk1_price.csv"
PV_CF = "ts:pv_cf.csv"
WIND_CF = "ts:wind_cf.csv"
T0 = "2018-12-31T23:00:00"

MEOH_SIZES = [(1, "MeOH_syn")] + [(k, f"MeOH_syn_{k:02d}") for k in range(2, 11)]
NH3_SIZES = [(1, "NH3_syn")] + [(k, f"NH3_syn_{k:02d}") for k in range(5, 11)]
# reference cost points; the sizes in between follow the per-ton slope of the largest size
MEOH_COST = {1: (1477965, 292972), 2: (2955930, 585944), 10: (14779652, 2929722)}
NH3_COST = {1: (626666, 211646), 5: (3133329, 1058230), 10: (6266657, 2116460)}
MEOH_PRICE = {"Base": -650, "Premium-1.5x": -975, "Premium-2x": -1300}
NH3_PRICE = {"Base": -460, "Premium-1.5x": -690, "Premium-2x": -920}


def _r(cls, entity, param="", layer="", time="", value=""):
    return (cls, entity, param, layer, time, str(value))


def reference_rows() -> list[tuple]:
    R = _r
    rows = [
        R("model", "hub", "db_lp_solver", "Solver-Gurobi", "", "Gurobi.jl"),
        R("model", "hub", "db_mip_solver", "Solver-Gurobi", "", "Gurobi.jl"),
        R("model", "hub", "duration_unit", "Base", "", "hour"),
        R("model", "hub", "model_end", "Base", "", "2019-01-01T03:00:00"),
        R("model", "hub", "model_end", "Year", "", "2019-12-31T00:00:00"),
        R("model", "hub", "model_start", "Base", "", "2019-01-01T00:00:00"),
        R("temporal_block", "operation", "resolution", "Base", "", "1h"),
        R("temporal_block", "investment", "block_end", "Inv", "", "364D"),
        R("temporal_block", "investment", "block_start", "Inv", "", "0h"),
        R("temporal_block", "investment", "resolution", "Inv", "", "364D"),
        R("user_constraint", "MeOH_sizes", "constraint_sense", MEOH_BIN, "", "<="),
        R("user_constraint", "MeOH_sizes", "right_hand_side", MEOH_BIN, "", 8736),
        R("user_constraint", "NH3_sizes", "constraint_sense", NH3_BIN, "", "<="),
        R("user_constraint", "NH3_sizes", "right_hand_side", NH3_BIN, "", 8736),
        # units
        R("unit", "BESS_charge", "candidate_units", ISC, "", 3),
        R("unit", "BESS_charge", "fom_cost", ISC, "", 4800),
        R("unit", "BESS_charge", "number_of_units", ISC, "", 0),
        R("unit", "BESS_charge", "unit_investment_cost", ISC, "", 23845),
        R("unit", "BESS_charge", "unit_investment_variable_type", ISC, "", CONT),
        R("unit", "El_PV", "fix_units_on", "Base", "", PV_CF),
        R("unit", "El_wind", "fix_units_on", "Base", "", WIND_CF),
        R("unit", "H2_compress", "candidate_units", ISC, "", 35),
        R("unit", "H2_compress", "fom_cost", ISC, "", 8339),
        R("unit", "H2_compress", "number_of_units", ISC, "", 0),
        R("unit", "H2_compress", "unit_investment_cost", ISC, "", 807792),
        R("unit", "H2_compress", "unit_investment_variable_type", ISC, "", CONT),
        R("unit", "H2_syn", "candidate_units", "Inv-H2-on", "", 222),
        R("unit", "H2_syn", "fom_cost", "Inv-H2-on", "", 3732),
        R("unit", "H2_syn", "min_down_time", "Mod-UC", "", "2h"),
        R("unit", "H2_syn", "number_of_units", "Inv-H2-on", "", 0),
        R("unit", "H2_syn", "number_of_units", TECH, "", 222),
        R("unit", "H2_syn", "online_variable_type", "Mod-UC", "", "unit_online_variable_type_integer"),
        R("unit", "H2_syn", "unit_investment_cost", "Inv-H2-on", "", 16574),
        R("unit", "H2_syn", "unit_investment_variable_type", "Inv-H2-cont", "", CONT),
        R("unit", "H2_syn", "unit_investment_variable_type", "Inv-H2-int", "", INT),
        R("unit", "MeOH_syn", "candidate_units", "Inv-MeOH-cont", "", 10),
        R("unit", "MeOH_syn", "unit_investment_variable_type", "Inv-MeOH-cont", "", CONT),
        R("unit", "NH3_syn", "candidate_units", "Inv-NH3-cont", "", 10),
        R("unit", "NH3_syn", "unit_investment_variable_type", "Inv-NH3-cont", "", CONT),
        R("unit", "PV", "candidate_units", "Inv-PPA", "", 1000),
        R("unit", "PV", "number_of_units", "Inv-PPA", "", 0),
        R("unit", "PV", "unit_availability_factor", "Inv-PPA", "", PV_CF),
        R("unit", "PV", "unit_investment_cost", "Inv-PPA", "", 41259),
        R("unit", "PV", "unit_investment_variable_type", "Inv-PPA", "", CONT),
        # nodes
        R("node", "BESS", "candidate_storages", ISC, "", 10),
        R("node", "BESS", "fix_node_state", "Base", T0, 0),
        R("node", "BESS", "frac_state_loss", "Base", "", "4.00E-05"),
        R("node", "BESS", "has_state", "Base", "", "TRUE"),
        R("node", "BESS", "node_state_cap", ISC, "", 1),
        R("node", "BESS", "storage_investment_cost", ISC, "", 13302),
        R("node", "BESS", "storage_investment_variable_type", ISC, "", "variable_type_continuous"),
        R("node", "BESS", "cyclic_condition", "Base", "", "True"),
        R("node", "El_BESS", "nodal_balance_sense", "Base", "", "=="),
        R("node", "El_curtailed", "nodal_balance_sense", "Base", "", ">="),
        R("node", "El_renew", "nodal_balance_sense", "Base", "", "=="),
        R("node", "H2", "nodal_balance_sense", "Base", "", "=="),
        R("node", "H2_decompressed", "nodal_balance_sense", "Base", "", "=="),
        R("node", "H2_out", "nodal_balance_sense", "Base", "", ">="),
        R("node", "H2_storage", "candidate_storages", ISC, "", 5),
        R("node", "H2_storage", "fix_node_state", "Base", T0, 0),
        R("node", "H2_storage", "frac_state_loss", "Base", "", 0.01),
        R("node", "H2_storage", "has_state", "Base", "", "TRUE"),
        R("node", "H2_storage", "node_state_cap", ISC, "", 0.5),
        R("node", "H2_storage", "storage_investment_cost", ISC, "", 24229),
        R("node", "H2_storage", "storage_investment_variable_type", ISC, "", "variable_type_integer"),
        R("node", "H2O_in", "nodal_balance_sense", "Base", "", "<="),
        R("node", "H2O_out", "nodal_balance_sense", "Base", "", ">="),
        R("node", "Heat_out", "nodal_balance_sense", "Base", "", ">="),
        R("node", "O_out", "nodal_balance_sense", "Base", "", ">="),
        R("node", "Steam_out", "nodal_balance_sense", "Base", "", ">="),
        # relationships
        R("unit__node__node", "BESS_charge|Group_El|BESS", "fix_ratio_in_out_unit_flow", "Base", "", 1.015),
        R("unit__node__node", "BESS_discharge|BESS|El_BESS", "fix_ratio_in_out_unit_flow", "Base", "", 1.026),
        R("unit__node__node", "El_curtail|El_renew|El_curtailed", "fix_ratio_in_out_unit_flow", "Base", "", 1),
        R("unit__node__node", "H2_compress|Group_El|H2_storage", "fix_ratio_in_out_unit_flow", "Base", "", 4),
        R("unit__node__node", "H2_compress|H2|H2_storage", "fix_ratio_in_out_unit_flow", "Base", "", 1),
        R("unit__node__node", "H2_decompress|H2_storage|H2_decompressed", "fix_ratio_in_out_unit_flow", "Base", "", 1),
        R("unit__node__node", "H2_discharge|H2_storage|H2_out", "fix_ratio_in_out_unit_flow", "Base", "", 1),
        R("unit__node__node", "H2_syn|Group_El|Group_H2_mFRR", "fix_ratio_in_out_unit_flow", "Base", "", 53.6),
        R("unit__node__node", "H2_syn|H2O_in|H2", "fix_ratio_in_out_unit_flow", "Base", "", 9.9999),
        R("unit__node__node", "H2_syn|H2|Heat_out", "fix_ratio_out_out_unit_flow", "Base", "", 9.763),
        R("unit__node__node", "H2_syn|H2|O_out", "fix_ratio_out_out_unit_flow", "Base", "", 4.965),
        R("unit__from_node", "BESS_charge|El_renew", "fuel_cost", "Base", "", PRICE),
        R("unit__from_node", "H2_compress|El_renew", "fuel_cost", "Base", "", PRICE),
        R("unit__from_node", "H2_syn|El_renew", "fuel_cost", "Base", "", PRICE),
        R("unit__from_node", "H2_syn|H2O_in", "fuel_cost", "Base", "", 10),
        R("unit__to_node", "El_curtail|El_curtailed", "fuel_cost", "Base", "", -0.0001),
        R("unit__to_node", "H2_discharge|H2_out", "fuel_cost", "Base", "", -2160),
        R("unit__to_node", "H2_discharge|H2_out", "fuel_cost", "Premium-1.5x", "", -3240),
        R("unit__to_node", "H2_discharge|H2_out", "fuel_cost", "Premium-2x", "", -4320),
        R("unit__to_node", "H2_syn|Heat_out", "fuel_cost", "Base", "", -2),
        R("unit__to_node", "H2_syn|O_out", "fuel_cost", "Base", "", -1),
        R("unit__to_node", "H2_syn|Group_H2_mFRR", "minimum_operating_point", "Mod-UC", "", 0.2),
        R("unit__to_node", "H2_syn|H2", "minimum_operating_point", "Mod-UC", "", 0.2),
        R("unit__from_node", "BESS_discharge|BESS", "unit_capacity", "Base", "", 1),
        R("unit__from_node", "H2_compress|H2", "unit_capacity", "Base", "", 0.06),
        R("unit__from_node", "H2_compress|H2", "unit_capacity", ISC, "", 1),
        R("unit__to_node", "BESS_charge|BESS", "unit_capacity", "Base", "", 1),
        R("unit__to_node", "El_PV|El_renew", "unit_capacity", "Base", "", 27),
        R("unit__to_node", "El_wind|El_renew", "unit_capacity", "Base", "", 54),
        R("unit__to_node", "H2_syn|Group_H2_mFRR", "unit_capacity", "Base", "", 0.235),
        R("unit__to_node", "H2_syn|Group_H2_mFRR", "unit_capacity", TECH, "", 0.0081),
        R("unit__to_node", "H2_syn|H2", "unit_capacity", "Base", "", 0.235),
        R("unit__to_node", "H2_syn|H2", "unit_capacity", TECH, "", 0.0081),
        R("unit__to_node", "PV|El_PPA", "unit_capacity", "Base", "", 1),
    ]
    for k, name in MEOH_SIZES:
        inv, fom = _size_cost(MEOH_COST, k)
        layer = "Inv-MeOH-on" if k == 1 else MEOH_BIN
        rows += [
            R("unit", name, "candidate_units", MEOH_BIN, "", 1),
            R("unit", name, "fom_cost", layer, "", fom),
            R("unit", name, "is_active", layer, "", "true"),
            R("unit", name, "number_of_units", layer, "", 0),
            R("unit", name, "unit_investment_cost", layer, "", inv),
            R("unit", name, "unit_investment_variable_type", MEOH_BIN, "", INT),
        ]
    for k, name in NH3_SIZES:
        inv, fom = _size_cost(NH3_COST, k)
        layer = "Inv-NH3-on" if k == 1 else NH3_BIN
        rows += [
            R("unit", name, "candidate_units", NH3_BIN, "", 1),
            R("unit", name, "fom_cost", layer, "", fom),
            R("unit", name, "is_active", layer, "", "true"),
            R("unit", name, "number_of_units", layer, "", 0),
            R("unit", name, "unit_investment_cost", layer, "", inv),
            R("unit", name, "unit_investment_variable_type", NH3_BIN, "", INT),
        ]
    return rows


def _size_cost(table: dict[int, tuple[int, int]], k: int) -> tuple[int, int]:
    if k in table:
        return table[k]
    inv10, fom10 = table[10]
    return round(inv10 * k / 10), round(fom10 * k / 10)


def supplement_rows() -> list[tuple]:
    R = _r
    rows = [R("scenario", layer) for layer in LAYERS]
    rows += [R("group__node", f"Group_El|{n}") for n in ("El_renew", "El_PPA", "El_BESS")]
    rows += [R("group__node", "Group_H2_mFRR|H2")]
    rows += [R("group__node", f"Group_H2_in|{n}") for n in ("H2", "H2_decompressed")]
    for n, sense in [("El_PPA", "=="), ("CO2_in", "<="), ("N2", "=="), ("MeOH_out", ">="), ("NH3_out", ">=")]:
        rows.append(R("node", n, "nodal_balance_sense", "Base", "", sense))
    for n in ("El_BESS", "El_curtailed", "El_renew", "H2", "H2_decompressed", "H2_out", "H2O_in",
              "H2O_out", "Heat_out", "O_out", "Steam_out"):
        rows.append(R("node", n))
    for u in ("El_curtail", "H2_discharge", "H2_decompress", "BESS_discharge"):
        rows.append(R("unit", u))
    rows += [
        R("unit", "BESS_discharge", "number_of_units", "Base", "", 10),
        R("unit", "PV", "number_of_units", "Base", "", 0),
        R("unit", "Wind", "number_of_units", "Base", "", 0),
        R("unit", "Wind", "candidate_units", "Inv-PPA", "", 1000),
        R("unit", "Wind", "number_of_units", "Inv-PPA", "", 0),
        R("unit", "Wind", "unit_availability_factor", "Inv-PPA", "", WIND_CF),
        R("unit", "Wind", "unit_investment_cost", "Inv-PPA", "", 81300),
        R("unit", "Wind", "unit_investment_variable_type", "Inv-PPA", "", CONT),
        R("unit__to_node", "Wind|El_PPA", "unit_capacity", "Base", "", 1),
        R("unit", "ASU", "is_active", "Base", "", "false"),
        R("unit", "ASU", "is_active", "Inv-NH3-on", "", "true"),
        R("unit", "ASU", "candidate_units", "Inv-NH3-on", "", 10),
        R("unit", "ASU", "number_of_units", "Inv-NH3-on", "", 0),
        R("unit", "ASU", "unit_investment_cost", "Inv-NH3-on", "", 180000),
        R("unit", "ASU", "fom_cost", "Inv-NH3-on", "", 36000),
        R("unit", "ASU", "unit_investment_variable_type", "Inv-NH3-on", "", CONT),
        R("unit__to_node", "ASU|N2", "unit_capacity", "Base", "", 1),
        R("unit__node__node", "ASU|Group_El|N2", "fix_ratio_in_out_unit_flow", "Base", "", 0.25),
    ]
    # plain flow relationships (the reference rows only list those carrying parameters)
    plain_from = [
        "BESS_charge|El_renew", "BESS_charge|El_PPA", "BESS_discharge|BESS", "El_curtail|El_renew",
        "H2_compress|H2", "H2_compress|El_renew", "H2_compress|El_PPA", "H2_compress|El_BESS",
        "H2_decompress|H2_storage", "H2_discharge|H2_storage",
        "H2_syn|El_renew", "H2_syn|El_PPA", "H2_syn|El_BESS", "H2_syn|H2O_in",
        "ASU|El_renew", "ASU|El_PPA", "ASU|El_BESS",
    ]
    plain_to = [
        "BESS_charge|BESS", "BESS_discharge|El_BESS", "El_PV|El_renew", "El_wind|El_renew",
        "El_curtail|El_curtailed", "H2_compress|H2_storage", "H2_decompress|H2_decompressed",
        "H2_discharge|H2_out", "H2_syn|H2", "H2_syn|Heat_out", "H2_syn|O_out", "H2_syn|Group_H2_mFRR",
        "PV|El_PPA", "Wind|El_PPA", "ASU|N2",
    ]
    rows += [R("unit__from_node", e) for e in plain_from]
    rows += [R("unit__to_node", e) for e in plain_to]
    rows.append(R("unit__from_node", "ASU|El_renew", "fuel_cost", "Base", "", PRICE))

    for fuel, sizes, sink, price, feed in (
        ("MeOH", MEOH_SIZES, "MeOH_out", MEOH_PRICE, [("CO2_in", 1.3735)]),
        ("NH3", NH3_SIZES, "NH3_out", NH3_PRICE, [("N2", 0.8225)]),
    ):
        h2_ratio, el_ratio = (0.1977, 0.17) if fuel == "MeOH" else (0.1776, 0.4)
        uc = f"{fuel}_sizes"
        bin_layer = MEOH_BIN if fuel == "MeOH" else NH3_BIN
        for k, u in sizes:
            rows += [
                R("unit", u, "is_active", "Base", "", "false"),
                R("unit", u, "online_variable_type", "Mod-UC", "", "unit_online_variable_type_integer"),
                R("unit", u, "min_down_time", "Mod-UC", "", "2h"),
                R("unit__to_node", f"{u}|{sink}", "unit_capacity", "Base", "", k),
                R("unit__to_node", f"{u}|{sink}", "minimum_operating_point", "Mod-UC", "", 0.2),
                R("unit__node__node", f"{u}|Group_H2_in|{sink}", "fix_ratio_in_out_unit_flow", "Base", "", h2_ratio),
                R("unit__node__node", f"{u}|Group_El|{sink}", "fix_ratio_in_out_unit_flow", "Base", "", el_ratio),
                R("unit__from_node", f"{u}|El_renew", "fuel_cost", "Base", "", PRICE),
                R("unit__user_constraint", f"{u}|{uc}", "units_on_coefficient", bin_layer, "", 1),
            ]
            for layer, p in price.items():
                rows.append(R("unit__to_node", f"{u}|{sink}", "fuel_cost", layer, "", p))
            for n, ratio in feed:
                rows.append(R("unit__node__node", f"{u}|{n}|{sink}", "fix_ratio_in_out_unit_flow", "Base", "", ratio))
                rows.append(R("unit__from_node", f"{u}|{n}"))
            for n in ("H2", "H2_decompressed", "El_PPA", "El_BESS"):
                rows.append(R("unit__from_node", f"{u}|{n}"))
            if fuel == "MeOH":
                rows.append(R("unit__to_node", f"{u}|H2O_out"))
                rows.append(R("unit__node__node", f"{u}|{sink}|H2O_out", "fix_ratio_out_out_unit_flow", "Base", "", 0.5625))
                rows.append(R("unit__from_node", f"{u}|CO2_in", "fuel_cost", "Base", "", 0))
    return rows


def synthetic_series(seed: int = 2019) -> dict[str, tuple[list[datetime], np.ndarray]]:
    """Hourly DK1-like price and local PV / wind capacity factors for 2019."""
    rng = np.random.default_rng(seed)
    start = datetime.fromisoformat(T0)
    n = 8761
    times = [start + timedelta(hours=k) for k in range(n)]
    hour = np.array([t.hour for t in times], dtype=float)
    doy = np.array([t.timetuple().tm_yday for t in times], dtype=float)
    weekday = np.array([t.weekday() for t in times])
    winter = np.cos(2 * np.pi * (doy - 15) / 365.0)

    z = np.empty(n)
    z[0] = 0.0
    eps = rng.standard_normal(n)
    for k in range(1, n):
        z[k] = 0.985 * z[k - 1] + np.sqrt(1 - 0.985 ** 2) * eps[k]
    wind = np.clip(0.36 + 0.07 * winter + 0.27 * z, 0.0, 0.97)

    daylen = 12.0 - 5.0 * winter
    sunrise = 12.5 - daylen / 2
    phase = (hour - sunrise) / daylen
    sun = np.where((phase > 0) & (phase < 1), np.sin(np.pi * np.clip(phase, 0, 1)), 0.0)
    c = np.empty(n)
    c[0] = 0.7
    ceps = rng.standard_normal(n)
    for k in range(1, n):
        c[k] = 0.9 * c[k - 1] + 0.1 * 0.7 + 0.08 * ceps[k]
    pv = np.clip(sun * (0.55 - 0.2 * winter) * np.clip(c, 0.15, 1.0), 0.0, 1.0)

    daily = 7.0 * np.sin(np.pi * (hour - 6) / 12.0) * (hour >= 6) * (hour <= 22)
    weekend = np.where(weekday >= 5, -6.0, 0.0)
    price = 39.0 + 5.0 * winter + daily + weekend - 30.0 * (wind - 0.36) + 6.0 * rng.standard_normal(n)
    price = np.maximum(price, -15.0)
    return {
        "dk1_price.csv": (times, np.round(price, 2)),
        "pv_cf.csv": (times, np.round(pv, 4)),
        "wind_cf.csv": (times, np.round(wind, 4)),
    }


def write(target: Path) -> None:
    target = Path(target)
    (target / "ts").mkdir(parents=True, exist_ok=True)
    rows = sorted(set(reference_rows() + supplement_rows()))
    with open(target / "model.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)
    for fname, (times, values) in synthetic_series().items():
        with open(target / "ts" / fname, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("timestamp", "value"))
            for t, v in zip(times, values):
                w.writerow((t.isoformat(), repr(float(v))))


if __name__ == "__main__":
    from hubopt.data import GLS_DIR

    write(Path(sys.argv[1]) if len(sys.argv) > 1 else GLS_DIR)
