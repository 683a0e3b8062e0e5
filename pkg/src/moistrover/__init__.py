"""Sparse-sensor soil-moisture monitoring with an inspecting ground robot.

Modules, bottom up: ``raster`` and ``pixmap`` (image primitives and codec),
``mapper`` (aerial image -> occupancy grid), ``planner`` (grid BFS),
``nav`` (path -> rotate/forward commands), ``calibration`` (gray -> moisture
polynomial), ``estimator`` (soil image -> moisture), ``link`` (sensor ADC and
radio frames), ``field`` / ``scenario`` / ``sim`` (ground truth and the
closed loop), ``cli``.
"""

__version__ = "0.1.0"
