#pragma once

// Small spaces, sites and presheaves used by the tests and the bundled documents.

#include <random>
#include <string>

#include "topos/limits.hpp"
#include "topos/logic.hpp"
#include "topos/site.hpp"
#include "topos/torsor.hpp"

namespace topos::gallery {

/// Points t (open) and c. Aliases: S, top, empty.
Site sierpinski();
/// Points a, b, every subset open. Alias: D.
Site discrete2();
/// Points 0, 1, 2 with opens ∅ ⊂ {0} ⊂ {0,1} ⊂ {0,1,2}. Alias: whole.
Site chain3();
/// Points a, b, x, y with basis {a}, {b}, {a,b,x}, {a,b,y}. Aliases: whole, Ux, Uy, ab.
Site pseudocircle();

/// 0 -> 1
CategoryRef arrow_category();

/// {0,1} on every nonempty open with identity restrictions, {*} on ∅.
/// Presheaf::constant is the variant that keeps {0,1} on ∅ as well.
Presheaf const2(const Site& site);

/// F(S) = F({t}) = {p,n}, F(∅) = {*}; a sheaf on the Sierpiński site.
Presheaf sierpinski_sort(const Site& site);
/// G(D) = {00,01,10,11}, G({a}) = G({b}) = {0,1}; the product sheaf on discrete2.
Presheaf discrete2_sort(const Site& site);

/// F as sort "F" with predicates A = {p everywhere} and B = {all of F over {t}}.
Signature sierpinski_signature(const Site& site);
/// G as sort "G" with predicates Z = {00 over D, 0 over each point} and First = {first digit 0}.
Signature discrete2_signature(const Site& site);

GroupSheaf z2(const Site& site);

/// Cover of the pseudocircle by Ux and Uy.
Cover pseudocircle_cover(const Site& site);
/// g_xy = g_yx = (0,1) on {a,b}: trivial over {a}, the flip over {b}.
Cocycle sign_cocycle(const Site& site, const GroupSheaf& group);

/// A functor on a shape drawn from a small pool (terminal, arrow, parallel pair,
/// span, cospan, discrete, chains, random posets) with at most max_objects
/// objects and value sets of at most max_size elements.
Diagram random_diagram(std::mt19937_64& rng, std::size_t max_objects = 4, std::size_t max_size = 4);

}  // namespace topos::gallery
