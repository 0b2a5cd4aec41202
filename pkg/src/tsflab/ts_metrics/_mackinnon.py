"""ADF tau -> p-value table for the constant-only regression with one series.

Generated by ``scripts/build_mackinnon_table.py`` from MacKinnon's (1994)
asymptotic response surface. Rows are (tau, p) sorted by tau; lookups
interpolate log(p) linearly and clamp outside the grid.
"""

# fmt: off
TAU_PVALUE_TABLE = (
    (-18.83, 2.0221237233e-30),
    (-18.80, 2.0229167171e-30),
    (-18.70, 2.0371729040e-30),
    (-18.60, 2.0696462570e-30),
    (-18.50, 2.1211986136e-30),
    (-18.40, 2.1932160098e-30),
    (-18.30, 2.2876704531e-30),
    (-18.20, 2.4072093733e-30),
    (-18.10, 2.5552783941e-30),
    (-18.00, 2.7362853389e-30),
    (-17.90, 2.9558162991e-30),
    (-17.80, 3.2209184241e-30),
    (-17.70, 3.5404691818e-30),
    (-17.60, 3.9256586863e-30),
    (-17.50, 4.3906209458e-30),
    (-17.40, 4.9532625146e-30),
    (-17.30, 5.6363543217e-30),
    (-17.20, 6.4689762782e-30),
    (-17.10, 7.4884372402e-30),
    (-17.00, 8.7428387781e-30),
    (-16.90, 1.0294515313e-29),
    (-16.80, 1.2224673211e-29),
    (-16.70, 1.4639678462e-29),
    (-16.60, 1.7679622654e-29),
    (-16.50, 2.1530053513e-29),
    (-16.40, 2.6438123472e-29),
    (-16.30, 3.2734937882e-29),
    (-16.20, 4.0866647780e-29),
    (-16.10, 5.1437940595e-29),
    (-16.00, 6.5273199858e-29),
    (-15.90, 8.3502977232e-29),
    (-15.80, 1.0768691599e-28),
    (-15.70, 1.3998944193e-28),
    (-15.60, 1.8343224161e-28),
    (-15.50, 2.4225906808e-28),
    (-15.40, 3.2246572700e-28),
    (-15.30, 4.3257424008e-28),
    (-15.20, 5.8476985656e-28),
    (-15.10, 7.9658008341e-28),
    (-15.00, 1.0933676118e-27),
    (-14.90, 1.5120517670e-27),
    (-14.80, 2.1066939760e-27),
    (-14.70, 2.9569261288e-27),
    (-14.60, 4.1807371203e-27),
    (-14.50, 5.9539747988e-27),
    (-14.40, 8.5402483086e-27),
    (-14.30, 1.2337019558e-26),
    (-14.20, 1.7947021348e-26),
    (-14.10, 2.6289495099e-26),
    (-14.00, 3.8774344737e-26),
    (-13.90, 5.7576188130e-26),
    (-13.80, 8.6067795941e-26),
    (-13.70, 1.2950905827e-25),
    (-13.60, 1.9614755942e-25),
    (-13.50, 2.9898529487e-25),
    (-13.40, 4.5862847110e-25),
    (-13.30, 7.0790635903e-25),
    (-13.20, 1.0993926776e-24),
    (-13.10, 1.7177104087e-24),
    (-13.00, 2.6997543033e-24),
    (-12.90, 4.2680753921e-24),
    (-12.80, 6.7862378534e-24),
    (-12.70, 1.0851008126e-23),
    (-12.60, 1.7446536782e-23),
    (-12.50, 2.8203296254e-23),
    (-12.40, 4.5834724587e-23),
    (-12.30, 7.4876472328e-23),
    (-12.20, 1.2294284134e-22),
    (-12.10, 2.0287037067e-22),
    (-12.00, 3.3638850442e-22),
    (-11.90, 5.6042785473e-22),
    (-11.80, 9.3799921952e-22),
    (-11.70, 1.5770187286e-21),
    (-11.60, 2.6629898161e-21),
    (-11.50, 4.5159213658e-21),
    (-11.40, 7.6897573914e-21),
    (-11.30, 1.3146579102e-20),
    (-11.20, 2.2562667696e-20),
    (-11.10, 3.8867685517e-20),
    (-11.00, 6.7196971329e-20),
    (-10.90, 1.1657757327e-19),
    (-10.80, 2.0292024931e-19),
    (-10.70, 3.5434056156e-19),
    (-10.60, 6.2064143316e-19),
    (-10.50, 1.0902438715e-18),
    (-10.40, 1.9204693755e-18),
    (-10.30, 3.3917910063e-18),
    (-10.20, 6.0051677787e-18),
    (-10.10, 1.0656908662e-17),
    (-10.00, 1.8953190533e-17),
    (-9.90, 3.3776343345e-17),
    (-9.80, 6.0305324864e-17),
    (-9.70, 1.0785597644e-16),
    (-9.60, 1.9320144544e-16),
    (-9.50, 3.4656563596e-16),
    (-9.40, 6.2244395156e-16),
    (-9.30, 1.1191404196e-15),
    (-9.20, 2.0140383342e-15),
    (-9.10, 3.6272563257e-15),
    (-9.00, 6.5364804571e-15),
    (-8.90, 1.1783981172e-14),
    (-8.80, 2.1249509962e-14),
    (-8.70, 3.8321311963e-14),
    (-8.60, 6.9102135460e-14),
    (-8.50, 1.2457377199e-13),
    (-8.40, 2.2447579969e-13),
    (-8.30, 4.0424369375e-13),
    (-8.20, 7.2739476681e-13),
    (-8.10, 1.3075912310e-12),
    (-8.00, 2.3478470090e-12),
    (-7.90, 4.2100180980e-12),
    (-7.80, 7.5376205002e-12),
    (-7.70, 1.3472240689e-11),
    (-7.60, 2.4033617778e-11),
    (-7.50, 4.2784857236e-11),
    (-7.40, 7.5992353969e-11),
    (-7.30, 1.3464034872e-10),
    (-7.20, 2.3791516603e-10),
    (-7.10, 4.1920461853e-10),
    (-7.00, 7.3637987253e-10),
    (-6.90, 1.2893297462e-09),
    (-6.80, 2.2497077787e-09),
    (-6.70, 3.9111229363e-09),
    (-6.60, 6.7733386022e-09),
    (-6.50, 1.1682674469e-08),
    (-6.40, 2.0064652920e-08),
    (-6.30, 3.4306954289e-08),
    (-6.20, 5.8385447288e-08),
    (-6.10, 9.8880207259e-08),
    (-6.00, 1.6661204834e-07),
    (-5.90, 2.7925780060e-07),
    (-5.80, 4.6549534731e-07),
    (-5.70, 7.7151687491e-07),
    (-5.60, 1.2711717107e-06),
    (-5.50, 2.0816136210e-06),
    (-5.40, 3.3872038899e-06),
    (-5.30, 5.4756530432e-06),
    (-5.20, 8.7920835785e-06),
    (-5.10, 1.4018995082e-05),
    (-5.00, 2.2193154714e-05),
    (-4.90, 3.4874359862e-05),
    (-4.80, 5.4385935695e-05),
    (-4.70, 8.4152777878e-05),
    (-4.60, 1.2916964005e-04),
    (-4.50, 1.9663990034e-04),
    (-4.40, 2.9683262235e-04),
    (-4.30, 4.4421234795e-04),
    (-4.20, 6.5890020605e-04),
    (-4.10, 9.6852449931e-04),
    (-4.00, 1.4105112530e-03),
    (-3.90, 2.0348471063e-03),
    (-3.80, 2.9073149933e-03),
    (-3.70, 4.1131541388e-03),
    (-3.60, 5.7610277513e-03),
    (-3.50, 7.9870940615e-03),
    (-3.40, 1.0958871608e-02),
    (-3.30, 1.4878474492e-02),
    (-3.20, 1.9984679219e-02),
    (-3.10, 2.6553188484e-02),
    (-3.00, 3.4894400275e-02),
    (-2.90, 4.5347997472e-02),
    (-2.80, 5.8273768069e-02),
    (-2.70, 7.4038269040e-02),
    (-2.60, 9.2997267439e-02),
    (-2.50, 1.1547432476e-01),
    (-2.40, 1.4173640869e-01),
    (-2.30, 1.7196797152e-01),
    (-2.20, 2.0624545685e-01),
    (-2.10, 2.4451460150e-01),
    (-2.00, 2.8657309917e-01),
    (-1.90, 3.3206111072e-01),
    (-1.80, 3.8046169361e-01),
    (-1.70, 4.3111247687e-01),
    (-1.61, 4.7797565259e-01),
    (-1.60, 4.8359346965e-01),
    (-1.50, 5.3351133891e-01),
    (-1.40, 5.8227611852e-01),
    (-1.30, 6.2917231368e-01),
    (-1.20, 6.7359571193e-01),
    (-1.10, 7.1507190516e-01),
    (-1.00, 7.5326430120e-01),
    (-0.90, 7.8797241767e-01),
    (-0.80, 8.1912206764e-01),
    (-0.70, 8.4674953789e-01),
    (-0.60, 8.7098202687e-01),
    (-0.50, 8.9201649658e-01),
    (-0.40, 9.1009877736e-01),
    (-0.30, 9.2550433221e-01),
    (-0.20, 9.3852161743e-01),
    (-0.10, 9.4943853350e-01),
    (0.00, 9.5853208606e-01),
    (0.10, 9.6606109408e-01),
    (0.20, 9.7226159393e-01),
    (0.30, 9.7734448639e-01),
    (0.40, 9.8149494162e-01),
    (0.50, 9.8487309631e-01),
    (0.60, 9.8761562917e-01),
    (0.70, 9.8983786960e-01),
    (0.80, 9.9163616803e-01),
    (0.90, 9.9309032633e-01),
    (1.00, 9.9426594855e-01),
    (1.10, 9.9521662256e-01),
    (1.20, 9.9598588316e-01),
    (1.30, 9.9660893594e-01),
    (1.40, 9.9711414191e-01),
    (1.50, 9.9752427541e-01),
    (1.60, 9.9785757578e-01),
    (1.70, 9.9812861661e-01),
    (1.80, 9.9834901705e-01),
    (1.90, 9.9852801893e-01),
    (2.00, 9.9867295120e-01),
    (2.10, 9.9878960061e-01),
    (2.20, 9.9888250502e-01),
    (2.30, 9.9895518284e-01),
    (2.40, 9.9901030962e-01),
    (2.50, 9.9904985053e-01),
    (2.60, 9.9907515515e-01),
    (2.70, 9.9908701926e-01),
    (2.74, 9.9908808010e-01),
)
# fmt: on
