"""
Three-point suite (subset-indexed ODE beyond two legs; minutes).
"""

CONFIG = {
    "description": "Filtered 3-point function of the sigma_z homodyne qubit with pairwise-overlapping windows.",
    "n_traj": 100_000,
    "dt": 1e-3,
    "seed": 11,
    "entries": [
        {
            "zoo": "qubit_homodyne_z",
            "t_end": 1.5,
            "requests": [
                {"id": "homodyne_3pt", "windows": ["d0:0,1", "d0:0.25,1.25", "d0:0.5,1.5"]},
            ],
        },
    ],
}
