"""
Zoo suite (every fixture, jump, diffusive and mixed; minutes).
"""

CONFIG = {
    "description": "Full model zoo at dt = 1e-3 with 10^4 trajectories per model.",
    "n_traj": 10_000,
    "dt": 1e-3,
    "seed": 7,
    "entries": [
        {
            "zoo": "decay_photodetect",
            "t_end": 3.0,
            "requests": [
                {"id": "decay_mean", "windows": ["d0:0,3"]},
                {"id": "decay_disjoint", "windows": ["d0:0,1", "d0:1,2"]},
                {"id": "decay_overlap", "windows": ["d0:0,1", "d0:0.5,1.5"]},
            ],
        },
        {
            "zoo": "qubit_homodyne_z",
            "t_end": 1.5,
            "requests": [
                {"id": "homodyne_mean", "windows": ["d0:0,1"]},
                {"id": "homodyne_overlap", "windows": ["d0:0,1", "d0:0.5,1.5"]},
            ],
        },
        {
            "zoo": "driven_qubit_fluorescence",
            "t_end": 2.0,
            "requests": [
                {"id": "fluorescence_mean", "windows": ["d0:0,2"]},
                {"id": "fluorescence_overlap", "windows": ["d0:0,1", "d0:0.5,1.5"]},
            ],
        },
        {
            "zoo": "cavity_heterodyne",
            "t_end": 2.0,
            "requests": [
                {"id": "cavity_inphase", "windows": ["d0:0,2"]},
                {"id": "cavity_cross", "windows": ["d0:0,1", "d1:0.5,1.5"]},
            ],
        },
        {
            "zoo": "mixed_two_detector",
            "t_end": 2.0,
            "requests": [
                {"id": "mixed_jump_diff", "windows": ["d0:0,1", "d1:1,2"]},
                {"id": "mixed_diff_mean", "windows": ["d1:0,2"]},
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
