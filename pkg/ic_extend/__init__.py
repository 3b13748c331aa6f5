"""
index coding 工具：把 IC 问题建模为 GF(p) 上的 fitting matrix，验证标量线性码、
精确计算小规模 minrank，并构造秩不变的 m 阶 / 2 阶扩展（复制、对合置换、Type_A/B/C 问题族）。
"""
