#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Null-model fitting configuration.

규칙: 이 파일에는 '상수/설정'만 둡니다. (로직 금지)
"""

# --- Newton fit ---
FIT_TOLERANCE = 1e-10          # ‖D⁻¹∇ℓ‖∞ 수렴 기준
FIT_MAX_ITERATIONS = 100
DENSE_CAP = 2000               # n ≤ cap 이면 exact Newton
DIVERGENCE_CAP = 40.0          # ‖α‖∞ 상한
LINE_SEARCH_CONTRACTION = 0.5
LINE_SEARCH_MAX_HALVINGS = 50
PLATEAU_RTOL = 1e-13           # 최적점 근처 ℓ 평탄 구간 판정

# --- Pairwise evaluation ---
PAIR_BLOCK_ROWS = 256          # 블록 단위 O(n²) 합산 (고정 순서)

# --- Log link start ---
LOG_LINK_MAX_PREDICTOR = -1e-3

# --- Links ---
LINK_NAMES = ("cloglog", "log", "logit")
FD_STEP = 1e-4
FD_RTOL = 1e-6
FD_ATOL = 1e-12
SUBEXP_BOX = (-6.0, 2.0)
SUBEXP_SAMPLES = 10_000

# --- Brute-force oracle ---
ORACLE_BOX = (-20.0, 5.0)
ORACLE_TOLERANCE = 1e-10       # golden-section bracket width
ORACLE_SWEEP_TOLERANCE = 1e-8  # max coordinate move per sweep
ORACLE_MAX_SWEEPS = 5000
ORACLE_MAX_N = 6
ORACLE_EDGE_MARGIN = 1e-6

# --- Sampling ---
SAMPLE_WEIGHT_SPREAD = 10.0    # max/min expected-degree weight
CALIBRATION_BRACKET = (-50.0, 50.0)

# --- Output ---
CSV_SIGNIFICANT_DIGITS = 6
DEFAULT_TABLE_JOBS = 1
