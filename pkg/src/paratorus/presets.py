"""Named experiment presets.

Each preset is a bundle of harness keys that passes config validation as-is:
exponents inside the admissible window 2/3 < beta < alpha < 1, nonpositive
symbol orders, a positivity-certified diffusion symbol, and a cutoff ladder
inside the grid's Nyquist bound.
"""

PRESETS = {
    "linear-benchmark": {
        "description": "f=g=1, A=B=identity; counterterms vanish and the "
                       "run is checked against the exact per-mode solver",
        "grid": 64,
        "alpha": 0.9,
        "beta": 0.7,
        "symbol": "identity",
        "symbol_b": "identity",
        "f": "const:1",
        "g": "const:1",
        "eps_ladder": "2^-3",
        "dt": 1e-3,
        "t_final": 0.1,
        "t_smooth": 0.0,
        "substep_policy": "fixed",
        "samples": 1,
    },
    "quasilinear-demo": {
        "description": "f=2+tanh, g=tanh, A=Gaussian smoothing, B=identity; "
                       "the renormalized nonlocal quasilinear run",
        "grid": 128,
        "alpha": 0.9,
        "beta": 0.7,
        "symbol": "gaussian:1e-4",
        "symbol_b": "identity",
        "f": "tanhshift:2",
        "g": "tanh",
        "eps_ladder": "2^-2..2^-5",
        "dt": 2.5e-3,
        "t_final": 0.25,
        "samples": 20,
        "u0": "coscos",
    },
    "convolution-renorm": {
        "description": "identity symbol counterterm ladder; c(eps) is a "
                       "spatial constant with the log-divergence slope",
        "grid": 128,
        "alpha": 0.9,
        "beta": 0.7,
        "symbol": "identity",
        "eps_ladder": "2^-2..2^-5",
        "samples": 100,
        "r": 2.0,
    },
    "modulated-renorm": {
        "description": "x-modulated symbol; the counterterm is a genuine "
                       "function on the torus",
        "grid": 64,
        "alpha": 0.9,
        "beta": 0.7,
        "symbol": "modulated:amp=0.5,kmin=4,s=-1",
        "mu": 0.5,
        "s": -1.0,
        "eps_ladder": "2^-2..2^-4",
        "samples": 50,
        "r": 2.0,
    },
}


def preset_catalog():
    """Names and descriptions of the built-in presets."""
    return {name: dict(spec) for name, spec in PRESETS.items()}
