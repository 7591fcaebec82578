"""
Smoke suite (quick sanity run, seconds).
"""

CONFIG = {
    "description": "Two cheap comparisons: photodetection mean and the pure-noise overlap term.",
    "n_traj": 2000,
    "dt": 2e-3,
    "seed": 1,
    "entries": [
        {
            "zoo": "decay_photodetect",
            "t_end": 3.0,
            "requests": [
                {"id": "decay_mean", "windows": ["d0:0,3"]},
            ],
        },
        {
            "zoo": "pure_noise",
            "t_end": 1.5,
            "requests": [
                {"id": "noise_overlap", "windows": ["d0:0,1", "d0:0.5,1.5"]},
            ],
        },
    ],
}
