"""Chi-square goodness-of-fit and independence tests.

Critical values for 1..120 degrees of freedom are embedded; larger
``df`` use the Wilson-Hilferty cube approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence

from .errors import InsufficientSamples

SIGNIFICANCES = (0.05, 0.01, 0.001)

# upper-tail standard normal quantiles for SIGNIFICANCES
_Z = (1.6448536, 2.3263479, 3.0902323)

# _CRITICAL[df - 1][j] is the upper SIGNIFICANCES[j] point of chi-square(df)
_CRITICAL = (
    (3.8415, 6.6349, 10.8276),  # 1
    (5.9915, 9.2103, 13.8155),  # 2
    (7.8147, 11.3449, 16.2662),  # 3
    (9.4877, 13.2767, 18.4668),  # 4
    (11.0705, 15.0863, 20.5150),  # 5
    (12.5916, 16.8119, 22.4577),  # 6
    (14.0671, 18.4753, 24.3219),  # 7
    (15.5073, 20.0902, 26.1245),  # 8
    (16.9190, 21.6660, 27.8772),  # 9
    (18.3070, 23.2093, 29.5883),  # 10
    (19.6751, 24.7250, 31.2641),  # 11
    (21.0261, 26.2170, 32.9095),  # 12
    (22.3620, 27.6882, 34.5282),  # 13
    (23.6848, 29.1412, 36.1233),  # 14
    (24.9958, 30.5779, 37.6973),  # 15
    (26.2962, 31.9999, 39.2524),  # 16
    (27.5871, 33.4087, 40.7902),  # 17
    (28.8693, 34.8053, 42.3124),  # 18
    (30.1435, 36.1909, 43.8202),  # 19
    (31.4104, 37.5662, 45.3147),  # 20
    (32.6706, 38.9322, 46.7970),  # 21
    (33.9244, 40.2894, 48.2679),  # 22
    (35.1725, 41.6384, 49.7282),  # 23
    (36.4150, 42.9798, 51.1786),  # 24
    (37.6525, 44.3141, 52.6197),  # 25
    (38.8851, 45.6417, 54.0520),  # 26
    (40.1133, 46.9629, 55.4760),  # 27
    (41.3371, 48.2782, 56.8923),  # 28
    (42.5570, 49.5879, 58.3012),  # 29
    (43.7730, 50.8922, 59.7031),  # 30
    (44.9853, 52.1914, 61.0983),  # 31
    (46.1943, 53.4858, 62.4872),  # 32
    (47.3999, 54.7755, 63.8701),  # 33
    (48.6024, 56.0609, 65.2472),  # 34
    (49.8018, 57.3421, 66.6188),  # 35
    (50.9985, 58.6192, 67.9852),  # 36
    (52.1923, 59.8925, 69.3465),  # 37
    (53.3835, 61.1621, 70.7029),  # 38
    (54.5722, 62.4281, 72.0547),  # 39
    (55.7585, 63.6907, 73.4020),  # 40
    (56.9424, 64.9501, 74.7449),  # 41
    (58.1240, 66.2062, 76.0838),  # 42
    (59.3035, 67.4593, 77.4186),  # 43
    (60.4809, 68.7095, 78.7495),  # 44
    (61.6562, 69.9568, 80.0767),  # 45
    (62.8296, 71.2014, 81.4003),  # 46
    (64.0011, 72.4433, 82.7204),  # 47
    (65.1708, 73.6826, 84.0371),  # 48
    (66.3386, 74.9195, 85.3506),  # 49
    (67.5048, 76.1539, 86.6608),  # 50
    (68.6693, 77.3860, 87.9680),  # 51
    (69.8322, 78.6158, 89.2722),  # 52
    (70.9935, 79.8433, 90.5734),  # 53
    (72.1532, 81.0688, 91.8718),  # 54
    (73.3115, 82.2921, 93.1675),  # 55
    (74.4683, 83.5134, 94.4605),  # 56
    (75.6237, 84.7328, 95.7510),  # 57
    (76.7778, 85.9502, 97.0388),  # 58
    (77.9305, 87.1657, 98.3242),  # 59
    (79.0819, 88.3794, 99.6072),  # 60
    (80.2321, 89.5913, 100.8879),  # 61
    (81.3810, 90.8015, 102.1662),  # 62
    (82.5287, 92.0100, 103.4424),  # 63
    (83.6753, 93.2169, 104.7163),  # 64
    (84.8206, 94.4221, 105.9881),  # 65
    (85.9649, 95.6257, 107.2579),  # 66
    (87.1081, 96.8278, 108.5256),  # 67
    (88.2502, 98.0284, 109.7913),  # 68
    (89.3912, 99.2275, 111.0551),  # 69
    (90.5312, 100.4252, 112.3169),  # 70
    (91.6702, 101.6214, 113.5769),  # 71
    (92.8083, 102.8163, 114.8351),  # 72
    (93.9453, 104.0098, 116.0915),  # 73
    (95.0815, 105.2020, 117.3462),  # 74
    (96.2167, 106.3929, 118.5991),  # 75
    (97.3510, 107.5825, 119.8503),  # 76
    (98.4844, 108.7709, 121.1000),  # 77
    (99.6169, 109.9581, 122.3480),  # 78
    (100.7486, 111.1440, 123.5944),  # 79
    (101.8795, 112.3288, 124.8392),  # 80
    (103.0095, 113.5124, 126.0826),  # 81
    (104.1387, 114.6949, 127.3244),  # 82
    (105.2672, 115.8763, 128.5648),  # 83
    (106.3948, 117.0565, 129.8037),  # 84
    (107.5217, 118.2357, 131.0412),  # 85
    (108.6479, 119.4139, 132.2773),  # 86
    (109.7733, 120.5910, 133.5121),  # 87
    (110.8980, 121.7671, 134.7455),  # 88
    (112.0220, 122.9422, 135.9776),  # 89
    (113.1453, 124.1163, 137.2084),  # 90
    (114.2679, 125.2895, 138.4379),  # 91
    (115.3898, 126.4617, 139.6661),  # 92
    (116.5110, 127.6329, 140.8931),  # 93
    (117.6317, 128.8032, 142.1189),  # 94
    (118.7516, 129.9727, 143.3435),  # 95
    (119.8709, 131.1412, 144.5670),  # 96
    (120.9896, 132.3089, 145.7892),  # 97
    (122.1077, 133.4757, 147.0104),  # 98
    (123.2252, 134.6416, 148.2304),  # 99
    (124.3421, 135.8067, 149.4493),  # 100
    (125.4584, 136.9710, 150.6671),  # 101
    (126.5741, 138.1345, 151.8838),  # 102
    (127.6893, 139.2971, 153.0995),  # 103
    (128.8039, 140.4590, 154.3141),  # 104
    (129.9180, 141.6201, 155.5277),  # 105
    (131.0315, 142.7804, 156.7403),  # 106
    (132.1444, 143.9400, 157.9518),  # 107
    (133.2569, 145.0988, 159.1624),  # 108
    (134.3688, 146.2569, 160.3721),  # 109
    (135.4802, 147.4143, 161.5807),  # 110
    (136.5911, 148.5710, 162.7885),  # 111
    (137.7015, 149.7269, 163.9953),  # 112
    (138.8114, 150.8822, 165.2011),  # 113
    (139.9208, 152.0367, 166.4061),  # 114
    (141.0297, 153.1906, 167.6102),  # 115
    (142.1382, 154.3438, 168.8133),  # 116
    (143.2461, 155.4964, 170.0156),  # 117
    (144.3537, 156.6483, 171.2171),  # 118
    (145.4607, 157.7995, 172.4177),  # 119
    (146.5674, 158.9502, 173.6174),  # 120
)


def critical_value(df: int, significance: float = 0.001) -> float:
    if significance not in SIGNIFICANCES:
        raise ValueError(f"significance must be one of {SIGNIFICANCES}")
    if df < 1:
        raise ValueError("degrees of freedom must be positive")
    j = SIGNIFICANCES.index(significance)
    if df <= len(_CRITICAL):
        return _CRITICAL[df - 1][j]
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + _Z[j] * sqrt(h)) ** 3


@dataclass(frozen=True)
class ChiSquareResult:
    cells: int
    statistic: float
    dof: int
    significance: float
    critical: float
    passed: bool
    name: str = "chi-square"
    trials: int = 0
    note: str = ""

    def stanza(self) -> str:
        lines = [
            f"[{self.name}]",
            f"trials = {self.trials}",
            f"cells = {self.cells}",
            f"statistic = {self.statistic:.6f}",
            f"df = {self.dof}",
            f"significance = {self.significance}",
            f"critical = {self.critical:.4f}",
            f"result = {'pass' if self.passed else 'fail'}",
        ]
        if self.note:
            lines.append(f"note = {self.note}")
        return "\n".join(lines) + "\n"


def _result(statistic, dof, cells, significance, name, trials):
    if dof == 0:
        crit = 0.0
        passed = statistic == 0.0
    else:
        crit = critical_value(dof, significance)
        passed = statistic <= crit
    return ChiSquareResult(cells, statistic, dof, significance, crit, passed, name, trials)


def goodness_of_fit(
    observed: Sequence[int],
    expected: Sequence[float] | None = None,
    significance: float = 0.001,
    min_expected: float = 5.0,
    name: str = "goodness-of-fit",
) -> ChiSquareResult:
    """Pearson goodness of fit; uniform expectation when ``expected`` is None."""
    observed = list(observed)
    total = sum(observed)
    cells = len(observed)
    if cells < 2 or total < 2:
        raise InsufficientSamples(f"{total} samples over {cells} cells")
    if expected is None:
        expected = [total / cells] * cells
    if min(expected) < min_expected:
        raise InsufficientSamples(f"expected count {min(expected):.2f} per cell is below {min_expected}")
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    return _result(stat, cells - 1, cells, significance, name, total)


def independence(
    table: Sequence[Sequence[int]],
    significance: float = 0.001,
    min_expected: float = 5.0,
    name: str = "independence",
) -> ChiSquareResult:
    """Pearson independence test on an r x c contingency table.

    All-zero rows and columns are dropped before the test.
    """
    rows = [list(r) for r in table if sum(r)]
    if not rows:
        raise InsufficientSamples("empty contingency table")
    keep = [j for j in range(len(rows[0])) if any(r[j] for r in rows)]
    rows = [[r[j] for j in keep] for r in rows]
    total = sum(map(sum, rows))
    if total < 2:
        raise InsufficientSamples("need at least two observations")
    row_sums = [sum(r) for r in rows]
    col_sums = [sum(col) for col in zip(*rows)]
    cells = len(rows) * len(col_sums)
    lowest = min(row_sums) * min(col_sums) / total
    if lowest < min_expected:
        raise InsufficientSamples(f"smallest expected cell count {lowest:.2f} is below {min_expected}")
    stat = 0.0
    for r, rs in zip(rows, row_sums):
        for o, cs in zip(r, col_sums):
            e = rs * cs / total
            stat += (o - e) ** 2 / e
    dof = (len(rows) - 1) * (len(col_sums) - 1)
    return _result(stat, dof, cells, significance, name, total)


def conditional_uniformity(
    groups: Sequence[Sequence[int]],
    significance: float = 0.001,
    min_expected: float = 5.0,
    name: str = "conditional-uniformity",
) -> ChiSquareResult:
    """Pooled test that, within every conditioning group, counts are uniform.

    Each entry of ``groups`` is the count vector of one conditioning value;
    the statistics and degrees of freedom of the per-group uniformity tests
    are summed.  Empty groups are skipped.
    """
    stat = 0.0
    dof = 0
    cells = 0
    total = 0
    for counts in groups:
        t = sum(counts)
        if not t:
            continue
        total += t
        c = len(counts)
        cells += c
        if c < 2:
            continue
        e = t / c
        if e < min_expected:
            raise InsufficientSamples(f"expected count {e:.2f} per cell is below {min_expected}")
        stat += sum((o - e) ** 2 / e for o in counts)
        dof += c - 1
    if total < 2:
        raise InsufficientSamples("need at least two observations")
    return _result(stat, dof, cells, significance, name, total)
