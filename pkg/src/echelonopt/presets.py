"""The bundled five-facility example scenario.

Two central facilities feed three customer-facing ones:

    SOURCE -> 1 -> 2
              1 -> 3 -> 4
                   3 -> 5

Facility 1 both serves customers and replenishes facility 2; facility 3
holds no customer demand of its own and exists to pool stock for 4
and 5 (its fill-rate target is 0).  Generator parameters are sized so
the initial policy guess is feasible with slack, leaving the optimizers
real room to cut inventory.
"""

from __future__ import annotations

import json
from pathlib import Path

FIVE_FACILITY_CONFIG: dict = {
    "network": {
        "facilities": [
            {"id": "1", "upstream": "SOURCE", "base_lead_time": 3,
             "target_beta": 0.95, "serves_customers": True},
            {"id": "2", "upstream": "1", "base_lead_time": 4,
             "target_beta": 0.95, "serves_customers": True},
            {"id": "3", "upstream": "1", "base_lead_time": 4,
             "target_beta": 0.0, "serves_customers": False},
            {"id": "4", "upstream": "3", "base_lead_time": 2,
             "target_beta": 0.95, "serves_customers": True},
            {"id": "5", "upstream": "3", "base_lead_time": 2,
             "target_beta": 0.95, "serves_customers": True},
        ],
    },
    "scenario": {
        "horizon": 360,
        "replications": 20,
        "penalty_rho": 1.0e6,
        "demand_choice": "backorder",
        "initial_inventory_fraction": 0.9,
        "base_seed": 20240707,
    },
    "initial_policy": {
        "1": {"reorder_point": 1000, "base_stock": 3000},
        "2": {"reorder_point": 250, "base_stock": 600},
        "3": {"reorder_point": 200, "base_stock": 900},
        "4": {"reorder_point": 150, "base_stock": 300},
        "5": {"reorder_point": 200, "base_stock": 600},
    },
    "bounds": {
        "1": {"reorder_point": [0, 2000], "base_stock": [0, 6000]},
        "2": {"reorder_point": [0, 500], "base_stock": [0, 1200]},
        "3": {"reorder_point": [0, 400], "base_stock": [0, 1800]},
        "4": {"reorder_point": [0, 300], "base_stock": [0, 600]},
        "5": {"reorder_point": [0, 400], "base_stock": [0, 1200]},
    },
    "generator": {
        "length": 360,
        "demand": {
            "1": {"mean": 60.0, "spread": 12.0},
            "2": {"mean": 35.0, "spread": 8.0},
            "4": {"mean": 20.0, "spread": 6.0},
            "5": {"mean": 25.0, "spread": 8.0},
        },
        "lead_delta": {
            "1": {"mean": 1.0, "spread": 1.0},
            "2": {"mean": 1.0, "spread": 1.0},
            "3": {"mean": 1.0, "spread": 1.0},
            "4": {"mean": 0.5, "spread": 0.5},
            "5": {"mean": 0.5, "spread": 0.5},
        },
    },
    "optimizers": {
        "nelder-mead": {"cycles": 100, "iterations_per_cycle": 50,
                        "max_evaluations": 5000, "max_minutes": 1440.0,
                        "seed": 0},
        "gp": {"cycles": 1000, "iterations_per_cycle": 20,
               "n_random_starts": 10, "kappa": 50.0,
               "max_evaluations": 30000, "max_minutes": 1440.0, "seed": 0},
        "rbf": {"max_evaluations": 1000, "max_minutes": 1440.0,
                "seed": 707},
    },
}


def write_five_facility_config(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(FIVE_FACILITY_CONFIG, indent=2,
                               sort_keys=True) + "\n")
    return path
