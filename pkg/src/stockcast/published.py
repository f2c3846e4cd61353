"""Reference NIFTY 50 results published for this study design, for side-by-side reports.

Cells that the source leaves blank or garbled (most Case II sensitivities and
correlations) are simply absent.  Percent metrics are in percent; ``pearson``
is a plain correlation coefficient.
"""
from __future__ import annotations

_CLASSIFY = {
    # algo: (Case I sens, spec, ppv, npv, ca), (Case II spec, ppv, npv, ca)
    "logistic": ((42.86, 94.32, 70.91, 83.62, 81.74), (81.08, 60.48, 88.05, 78.62)),
    "knn": ((64.29, 94.67, 79.59, 89.13, 87.25), (94.98, 45.83, 72.67, 70.90)),
    "cart": ((40.66, 92.18, 62.71, 82.78, 79.60), (89.77, 58.59, 77.89, 74.48)),
    "bagging": ((68.13, 96.80, 87.32, 90.38, 89.80), (85.33, 52.80, 78.37, 72.69)),
    "adaboost": ((100.00, 100.00, 100.00, 100.00, 100.00), (79.67, 45.89, 84.75, 73.66)),
    "random_forest": ((37.36, 88.46, 51.13, 81.37, 75.97), (63.51, 44.41, 85.45, 66.21)),
    "ann": ((68.12, 91.31, 75.81, 87.76, 83.17), (99.95, 99.98, 73.06, 73.66)),
    "svm": ((64.71, 78.53, 18.13, 96.80, 77.58), (75.34, 20.77, 96.72, 75.03)),
}

_REGRESS = {
    # algo: (Case I pearson, Case I mape, Case II mape)
    "multivariate_linear": (0.56, 35.02, 90.00),
    "cart": (0.98, 60.73, 78.37),
    "bagging": (0.70, 23.47, 29.32),
    "adaboost": (0.69, 16.72, 21.34),
    "random_forest": (0.95, 15.23, 19.35),
    "ann": (0.73, 12.32, 25.72),
    "svm": (0.71, 17.31, 13.59),
}


def _build() -> dict[tuple[str, str, str], dict[str, float]]:
    table: dict[tuple[str, str, str], dict[str, float]] = {}
    for algo, (c1, c2) in _CLASSIFY.items():
        table[(algo, "classify", "CaseI")] = dict(zip(("sensitivity", "specificity", "ppv", "npv", "ca"), c1))
        table[(algo, "classify", "CaseII")] = dict(zip(("specificity", "ppv", "npv", "ca"), c2))
    for algo, (r, m1, m2) in _REGRESS.items():
        table[(algo, "regress", "CaseI")] = {"pearson": r, "mape": m1}
        table[(algo, "regress", "CaseII")] = {"mape": m2}
    table[("lstm", "regress", "CaseI")] = {"pearson": 0.99, "mape": 8.70}
    table[("sofnn", "regress", "CaseI")] = {"pearson": 1.00, "mape": 4.37, "matched_pct": 93.0}
    table[("sofnn", "regress", "CaseII")] = {"mape": 5.37, "matched_pct": 86.0}
    return table


REFERENCE = _build()

GRANGER_REFERENCE = {
    # lag: (calm, happy, alert, kind)
    1: (0.0317, 0.5867, 0.0432, 0.1278),
    2: (0.0389, 0.2374, 0.2168, 0.1325),
    3: (0.0217, 0.0874, 0.3124, 0.1653),
    4: (0.0047, 0.0542, 0.3456, 0.1732),
    5: (0.0154, 0.0673, 0.1257, 0.2345),
}


def lookup(model: str, task: str, case: str) -> dict[str, float]:
    return REFERENCE.get((model, task, case), {})
