"""Formula generators: gate netlists, floating-point and arithmetic miters,
function encodings."""
from .netlist import Netlist, encode_circuit, emit_wire_map, parse_wire_map

__all__ = ["Netlist", "encode_circuit", "emit_wire_map", "parse_wire_map"]
