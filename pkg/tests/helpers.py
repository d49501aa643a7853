"""Shared random generators for the property and acceptance tests."""

from __future__ import annotations

import random

from zxexact.diagram import Diagram, PiRational, hbox, xspider, zspider


def random_diagram(rng: random.Random, max_nodes: int = 6, den: int = 4,
                   n_inputs: int | None = None, with_h: bool = True,
                   max_ports: int = 6) -> Diagram:
    """A random well-formed open diagram with spider phases on the pi/den grid.

    Stubs are paired into internal edges (self-loops permitted); leftovers
    become boundary ports.  H boxes always receive exactly two stubs.
    """
    d = Diagram()
    n = rng.randint(1, max_nodes)
    stubs: list[str] = []
    for i in range(n):
        name = f"n{i}"
        roll = rng.random()
        if with_h and roll < 0.15:
            d.nodes[name] = hbox()
            stubs += [name, name]
            continue
        phase = PiRational(rng.randrange(2 * den), den)
        d.nodes[name] = zspider(phase) if roll < 0.6 else xspider(phase)
        stubs += [name] * rng.randint(0, 3)
    rng.shuffle(stubs)
    port_stubs: list[str] = []
    while stubs:
        a = stubs.pop()
        is_h = d.nodes[a].kind == "H"
        partner = next((j for j in range(len(stubs) - 1, -1, -1)
                        if not (is_h and stubs[j] == a)), None)
        if partner is not None and (is_h or rng.random() < 0.55):
            d.add_edge(a, stubs.pop(partner))
        else:
            port_stubs.append(a)
    while len(port_stubs) > max_ports:
        a = port_stubs.pop()
        j = next((j for j in range(len(port_stubs) - 1, -1, -1)
                  if not (d.nodes[a].kind == "H" and port_stubs[j] == a)), None)
        if j is None:
            port_stubs.insert(0, a)
            break
        d.add_edge(a, port_stubs.pop(j))
    inputs, outputs = [], []
    for k, a in enumerate(port_stubs):
        if n_inputs is not None and len(inputs) < n_inputs:
            pid = f"i{len(inputs)}"
            inputs.append(pid)
        elif rng.random() < 0.5 and n_inputs is None:
            pid = f"i{len(inputs)}"
            inputs.append(pid)
        else:
            pid = f"o{len(outputs)}"
            outputs.append(pid)
        d.add_edge(a, pid)
    while n_inputs is not None and len(inputs) < n_inputs:
        # top up with wires straight through to outputs
        pid_i, pid_o = f"i{len(inputs)}", f"o{len(outputs)}"
        inputs.append(pid_i)
        outputs.append(pid_o)
        d.add_edge(pid_i, pid_o)
    d.inputs = tuple(inputs)
    d.outputs = tuple(outputs)
    return d
