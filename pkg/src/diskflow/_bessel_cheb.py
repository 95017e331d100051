"""Chebyshev tables for sqrt(x)*exp(x)*K_nu(x) on [2, 16].

Generated by tools/gen_bessel_cheb.py (mpmath, 40 digits); do not edit.
"""

import numpy as np

BAND_LO = 2.0
BAND_HI = 16.0

CHEB_G0 = np.array([
    1.2289216889743350832,
    0.021531971640245676995,
    -0.0095440887725211805142,
    0.0042468309143101622649,
    -0.001896372486444060527,
    0.0008495261453452613368,
    -0.00038168578361151268126,
    0.00017195167520462111762,
    -0.000077657724943707078285,
    0.000035152597786280429174,
    -0.000015945940234791635218,
    7.2476274419539448682e-6,
    -3.3001552915575814654e-6,
    1.5052592924077067247e-6,
    -6.8766590048587060565e-7,
    3.1462140392717181161e-7,
    -1.4414615197823092457e-7,
    6.6127918254665358386e-8,
    -3.037385005842156526e-8,
    1.3967448138899505096e-8,
    -6.429957450454533123e-9,
    2.9631033664206570165e-9,
    -1.3668129676359071572e-9,
    6.3106301450438797849e-10,
    -2.9161989211020646019e-10,
    1.3487246151148499751e-10,
    -6.2427142236776813299e-11,
    2.8916865247990052775e-11,
    -1.340421052914588301e-11,
    6.2176927986026375247e-12,
    -2.886037268237387658e-12,
    1.3404381783643290262e-12,
    -6.2294849440171012364e-13,
    2.8967234488406271754e-13,
    -1.3477246953656881035e-13,
    6.2737170144695901316e-14,
    -2.9219255843807436316e-14,
    1.3615239610561907451e-14,
    -6.3472448150132831866e-15,
    2.9603386499318704455e-15,
    -1.3812952118755144894e-15,
    6.4478325657483628587e-16,
    -3.0110409398690791696e-16,
    1.4066598781485280047e-16,
    -6.5739326679729521406e-17,
    3.0734035446758721384e-17,
    -1.4373643078698160086e-17,
])

CHEB_G1 = np.array([
    1.33065561189095189,
    -0.070743312881469358791,
    0.032446498613793265109,
    -0.014919498695532892747,
    0.0068758775460859432087,
    -0.0031753315507898438695,
    0.0014690953989742474488,
    -0.00068082440176669685052,
    0.00031599352755594462502,
    -0.00014686594047073162134,
    0.000068345921685777364511,
    -0.000031842519690268796621,
    0.000014851329625920950009,
    -6.933467900251345266e-6,
    3.2398948342542800771e-6,
    -1.5152274398784191048e-6,
    7.0919458229887359771e-7,
    -3.3217760337957629678e-7,
    1.5569388134617546637e-7,
    -7.3021350985388408834e-8,
    3.4267931615138091066e-8,
    -1.6090507877451971042e-8,
    7.5592887228386696497e-9,
    -3.5531057934673549811e-9,
    1.6708565335542997224e-9,
    -7.8607280024903541433e-10,
    3.6997178747555376326e-10,
    -1.7419958402562023373e-10,
    8.2052050072947063341e-11,
    -3.8662272037882202168e-11,
    1.8223563472059362478e-11,
    -8.5925119713899409442e-12,
    4.0526705378277875995e-12,
    -1.9120119704529037461e-12,
    9.0232360187943855875e-13,
    -4.2594257211060686247e-13,
    2.0111837971451782534e-13,
    -9.4986027735620695251e-14,
    4.487149115833171826e-14,
    -2.12021505581970561e-14,
    1.0020376307195144494e-14,
    -4.7367356665970956538e-15,
    2.2395552136016826543e-15,
    -1.0590796027257216094e-15,
    5.0092939723627049015e-16,
    -2.3697501931142721695e-16,
    1.1212538614561103327e-16,
    -5.3061316501717497201e-17,
    2.5114368343022723761e-17,
    -1.1888697537950658561e-17,
])
