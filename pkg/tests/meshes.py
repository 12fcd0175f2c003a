"""Built-in mesh families at four sizes each, for patch and property tests."""

from shvem.mesh import (gen_degenerate_strip, gen_nonconvex_strip, gen_triangle6_perturbed,
                        gen_triangle6_structured)

FAMILIES = {
    "diagonal": lambda n: gen_triangle6_structured(n, n, ((0, 2), (0, 1)), "diagonal"),
    "diagonal_down": lambda n: gen_triangle6_structured(n, n + 1, ((0, 1), (0, 1)),
                                                        "diagonal", "down"),
    "cross": lambda n: gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "cross"),
    "perturbed": lambda n: gen_triangle6_perturbed(
        gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "cross"), 0.2, seed=n),
    "degenerate": lambda n: gen_degenerate_strip(2 * n, 1 + n % 2, 4.0, 1.0, 0.9),
    "nonconvex": lambda n: gen_nonconvex_strip(2 * n, 1 + n % 2, 4.0, 1.0, 0.3),
}
SIZES = (1, 2, 3, 4)


def all_meshes():
    for fam, make in FAMILIES.items():
        for n in SIZES:
            yield f"{fam}-{n}", make(n)
