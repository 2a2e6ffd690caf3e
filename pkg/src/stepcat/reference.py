"""Published bound constants used as reference columns and test oracles.

Each mapping is ``n -> constant`` rounded to 6 decimals.  ``None`` marks
lengths for which the method defines no schedule.
"""

# objective constants C in f_n - f* <= C (L/2) ||x0 - x*||^2
OBJ_TEBOULLE = {
    1: 0.261204,
    2: 0.142229,
    3: 0.095827,
    4: 0.071613,
    5: 0.056899,
    6: 0.047070,
    7: 0.040066,
    8: 0.034835,
    9: 0.030787,
    10: 0.027565,
    11: 0.024943,
    12: 0.022768,
    13: 0.020936,
    14: 0.019373,
    15: 0.018024,
    25: 0.010587,
    31: 0.008473,
    63: 0.004088,
    127: 0.002003,
    255: 0.000990,
    511: 0.000492,
}

OBJ_GRIMMER = {
    1: 0.250000,
    2: None,
    3: 0.085786,
    4: None,
    5: None,
    6: None,
    7: 0.032768,
    8: None,
    9: None,
    10: None,
    11: None,
    12: None,
    13: None,
    14: None,
    15: 0.013082,
    25: None,
    31: 0.005327,
    63: 0.002189,
    127: 0.000903,
    255: 0.000373,
    511: 0.000155,
}

# branch-and-bound numerical constants; shipped as reference data only, never computed
OBJ_DASGUPTA = {
    1: 0.250000,
    2: 0.131892,
    3: 0.085786,
    4: 0.062340,
    5: 0.048141,
    6: 0.040197,
    7: 0.032662,
    8: 0.028109,
    9: 0.024565,
    10: 0.021245,
    11: 0.019184,
    12: 0.017282,
    13: 0.015969,
    14: 0.014752,
    15: 0.013184,
    25: 0.006952,
    31: 0.005443,
    63: None,
    127: None,
    255: None,
    511: None,
}

# gradient constants C in ||g_n||^2 / (2L) <= C (f0 - f*)
GRAD_ROTARU = {
    2: 0.133975,
    3: 0.090059,
    4: 0.067412,
    5: 0.053707,
    6: 0.044561,
    7: 0.038039,
    8: 0.033161,
    9: 0.029378,
    10: 0.026362,
    11: 0.023902,
    12: 0.021858,
    13: 0.020133,
    14: 0.018658,
    15: 0.017384,
    25: 0.010308,
    31: 0.008279,
    63: 0.004031,
    127: 0.001987,
    255: 0.000986,
    511: 0.000491,
}

GRAD_GRIMMER = {
    2: None,
    3: 0.085786,
    4: None,
    5: None,
    6: None,
    7: 0.032768,
    8: None,
    9: None,
    10: None,
    11: None,
    12: None,
    13: None,
    14: None,
    15: 0.013082,
    25: None,
    31: 0.005327,
    63: 0.002189,
    127: 0.000903,
    255: 0.000373,
    511: 0.000155,
}

TABLE_ROWS = tuple(OBJ_TEBOULLE)

