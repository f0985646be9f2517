// Generated by `cargo run --release -p ivdiag --example gen_tf_table`.
// Worst-case (|rho| = 1) tF critical values c(F); see `tf::derive_critical_curve`.

use super::tf::TfTable;

pub(super) const TABLE_05: TfTable = TfTable {
    alpha: 0.05,
    knots: &[
        (4.0, 18.654321337797356),
        (4.006568985773514, 18.272351753869085),
        (4.013410150512023, 17.89806810409469),
        (4.02053477166254, 17.53129718403903),
        (4.0279545939411445, 17.17193555828521),
        (4.035681848693782, 16.820115413835584),
        (4.043729274059258, 16.47526168203121),
        (4.05211013596766, 16.13745921010216),
        (4.060838250008834, 15.806499263730917),
        (4.06992800420695, 15.482424209946531),
        (4.079394382738717, 15.164858818272508),
        (4.089252990634325, 14.853843189860923),
        (4.099520079501858, 14.549212373623797),
        (4.110212574317558, 14.250849029748805),
        (4.1213481013261255, 13.958596322825708),
        (4.1329450170970325, 13.672391642216336),
        (4.145022438784759, 13.392166702433846),
        (4.157600275642818, 13.117718059043334),
        (4.170699261843554, 12.848962753314114),
        (4.184340990657765, 12.585805953516038),
        (4.198547950050549, 12.328178287465551),
        (4.213343559752008, 12.075989805450094),
        (4.228752209863946, 11.82907604275978),
        (4.244799301066188, 11.587330280803696),
        (4.261511286488818, 11.35076419248063),
        (4.278915715319331, 11.119193044098038),
        (4.297041278216617, 10.892543655714068),
        (4.315917854606615, 10.670746790593547),
        (4.335576561937618, 10.45369149352927),
        (4.356049806976416, 10.241331344154492),
        (4.377371339229844, 10.033517809656043),
        (4.399576306579792, 9.830258843382335),
        (4.42270131322339, 9.63140154965972),
        (4.446784480013893, 9.436899543403594),
        (4.471865507301717, 9.246674528065554),
        (4.49798574037923, 9.060628393334095),
        (4.52518823763718, 8.878698151721903),
        (4.553517841545112, 8.700823344956838),
        (4.583021252572779, 8.526914649033019),
        (4.613747106174416, 8.356900376271328),
        (4.645746052962768, 8.190714519007981),
        (4.679070842205053, 8.028299185238453),
        (4.713776408778479, 7.869579189934667),
        (4.749919963728682, 7.714471450055058),
        (4.787561088580356, 7.562925241748907),
        (4.826761833555535, 7.41487923796368),
        (4.867586819861456, 7.2702614065372195),
        (4.910103346216603, 7.129005043916654),
        (4.954381499790553, 6.9910501006539585),
        (5.000494271740486, 6.856328940766738),
        (5.048517677534841, 6.724795838030066),
        (5.098530882262445, 6.5963744343978785),
        (5.150616331133696, 6.471011336862711),
        (5.204859885388926, 6.3486424210476695),
        (5.2613509638379785, 6.229216102419462),
        (5.320182690264341, 6.112665012991146),
        (5.381452046936787, 5.99893811865098),
        (5.445260034481641, 5.887977362929618),
        (5.511711838379153, 5.779721285563253),
        (5.580917002358496, 5.674119217956936),
        (5.652989608977185, 5.571110699072702),
        (5.728048467682626, 5.470644540631081),
        (5.806217310665785, 5.3726621914275405),
        (5.887624996829855, 5.277114484805983),
        (5.972405724210144, 5.1839426283641545),
        (6.060699251195351, 5.093098675585903),
        (6.15265112691493, 5.004525557693208),
        (6.248412931172282, 4.918176185744916),
        (6.348142524319352, 4.833995159488539),
        (6.452004307484495, 4.751933511851134),
        (6.560169493582624, 4.671940958520485),
        (6.672816389554354, 4.593969841900289),
        (6.790130690299463, 4.517969560802972),
        (6.912305784789124, 4.443893600669054),
        (7.039543074861626, 4.371694003288043),
        (7.1720523072270135, 4.301326123690767),
        (7.310051919228016, 4.232742848689841),
        (7.453769398927204, 4.165900987906275),
        (7.603441660113967, 4.100756995402084),
        (7.7593154328495295, 4.03726770213447),
        (7.921647670193761, 3.975392023169077),
        (8.090705971784303, 3.9150889554187125),
        (8.266769024966226, 3.856319649088316),
        (8.450127064199455, 3.79904534836879),
        (8.641082349501218, 3.743228529453844),
        (8.839949664712286, 3.68883313709067),
        (9.047056836408323, 3.635823822811763),
        (9.262745274311794, 3.584166301992869),
        (9.48737053409525, 3.533827446836194),
        (9.721302903503783, 3.484775217483822),
        (9.964928012762858, 3.4369785692594714),
        (10.218647470277695, 3.390407435639453),
        (10.48287952467226, 3.3450326492088225),
        (10.758059754259055, 3.300825885143453),
        (11.04464178507644, 3.257759876461052),
        (11.343098038676988, 3.2158079433085676),
        (11.653920510899738, 3.1749443941004367),
        (11.977621582909993, 3.135143936425672),
        (12.314734865843729, 3.096382259109229),
        (12.665816080448899, 3.058635286040371),
        (13.031443973173825, 3.021879872627473),
        (13.412221270212669, 2.9860947782399383),
        (13.808775671080792, 2.951252869070024),
        (14.221760883357874, 2.9173369551276123),
        (14.65185770030445, 2.8843247489678845),
        (15.099775123128477, 2.852191438421693),
        (15.566251529751678, 2.8209207285905684),
        (16.05205589200258, 2.7904897824756696),
        (16.557989043242625, 2.760879016497133),
        (17.084884998515005, 2.7320675857106207),
        (17.633612329392523, 2.7040360012881766),
        (18.20507559579072, 2.676764927453314),
        (18.8002168371068, 2.650235177204669),
        (19.420017125142174, 2.624428980397096),
        (20.06549818136883, 2.5993264395351408),
        (20.737724061205277, 2.574909559406316),
        (21.437802908078847, 2.551159991072691),
        (22.16688878016558, 2.528061018507199),
        (22.926183552819214, 2.5055943682348834),
        (23.7169388998252, 2.483743074780526),
        (24.54045835674607, 2.462491038824719),
        (25.398099469759124, 2.441821145636247),
        (26.29127603352909, 2.4217178103353296),
        (27.221460421804498, 2.4021650762374063),
        (28.190186014580075, 2.3831476455359937),
        (29.199049725825834, 2.364650584490062),
        (30.249714635950035, 2.346658970334882),
        (31.34391273333547, 2.329158912175599),
        (32.48344776946828, 2.312136035680272),
        (33.67019823236624, 2.295576960365618),
        (34.90612044320766, 2.2794683405129557),
        (36.19325178126598, 2.263797069661117),
        (37.53371404246592, 2.2485509729008903),
        (38.92971693709818, 2.233717589469365),
        (40.383561732457885, 2.219284881240678),
        (41.89764504641215, 2.205241433763084),
        (43.474462798149844, 2.191575860468843),
        (45.11661432262682, 2.1782772000115265),
        (46.82680665548855, 2.165334944380158),
        (48.60785899553411, 2.1527385919647415),
        (50.46270735207746, 2.1404782451684654),
        (52.39440938486761, 2.128544054291275),
        (54.4061494445453, 2.1169265083513737),
        (56.50124382194597, 2.1056166163180396),
        (58.683146214901726, 2.0946052844064633),
        (60.955453421554935, 2.083883994042479),
        (63.32191126956776, 2.073444243558499),
        (65.7864207910025, 2.0632778816836996),
        (68.35304465305124, 2.0533771805290923),
        (71.0260138552165, 2.0437343226871683),
        (73.80973470398197, 2.034341906702448),
        (76.70879607647153, 2.0251928364889014),
        (79.7279769850703, 2.0162800291680933),
        (82.87225445547767, 2.0075967664845775),
        (86.14681173117935, 1.999136461179274),
        (89.55704681786243, 1.990892821090521),
        (93.10858138186008, 1.9828596202680204),
        (96.80727001729322, 1.9750309178021084),
        (100.65920989718667, 1.9674009183105041),
        (104.67075082446871, 1.9599639845400538),
    ],
};

pub(super) const TABLE_01: TfTable = TfTable {
    alpha: 0.01,
    knots: &[
        (6.8, 41.59119957249125),
        (6.81189405777331, 40.142024971636445),
        (6.82464496411055, 38.74150231720788),
        (6.838314446428509, 37.38909233097489),
        (6.852968678990417, 36.08241913318433),
        (6.868678603256996, 34.82036410590933),
        (6.885520271315627, 33.60078969856751),
        (6.903575214050173, 32.4228098640474),
        (6.922930835833768, 31.28509193555599),
        (6.943680837655304, 30.186265385784417),
        (6.965925670727973, 29.12476797863431),
        (6.989773022775784, 28.099591734198714),
        (7.015338339352197, 27.10952950102872),
        (7.042745382714573, 26.15342964364054),
        (7.072126830959974, 25.2302128845186),
        (7.103624920322734, 24.338680069312677),
        (7.137392133743187, 23.478049312515086),
        (7.173591939040916, 22.647284800288492),
        (7.2123995802660525, 21.845245544611448),
        (7.254002926059554, 21.071291381907077),
        (7.298603379129414, 20.324289976508794),
        (7.34641685124558, 19.60356331282725),
        (7.39767480847356, 18.908171267089223),
        (7.452625391706714, 18.23743930358512),
        (7.511534617921748, 17.590495657253765),
        (7.574687667972732, 16.96661309697932),
        (7.642390267157856, 16.36513582683551),
        (7.714970165242286, 15.785308526383542),
        (7.792778723101964, 15.226476697659022),
        (7.876192613669299, 14.687979746933241),
        (7.9656156454150775, 14.169194004663098),
        (8.061480717194117, 13.669501911767862),
        (8.1642519139181, 13.1882947025991),
        (8.274426753200796, 12.725003900176397),
        (8.392538593851716, 12.279044086091837),
        (8.519159217877805, 11.849891508998995),
        (8.65490159849264, 11.436991378191424),
        (8.800422867533182, 11.039835196510214),
        (8.956427496649411, 10.65790592397744),
        (9.123670707666976, 10.290725126561235),
        (9.302962128632615, 9.93780763415231),
        (9.495169713241243, 9.598696036731594),
        (9.70122394261881, 9.272944551089353),
        (9.922122329801795, 8.96012259817609),
        (10.158934248719659, 8.65981118328262),
        (10.41280611105746, 8.371608835427763),
        (10.684966916059922, 8.095130484529449),
        (10.976734200143685, 7.830002160794691),
        (11.28952041511997, 7.575867897065196),
        (11.624839765904685, 7.332379420960632),
        (11.984315540817615, 7.099205130071142),
        (12.369687969956724, 6.876021942806606),
        (12.782822649690141, 6.662517383010171),
        (13.225719574049055, 6.458385295278002),
        (13.700522816742598, 6.263327909167854),
        (14.209530910665624, 6.077050885036718),
        (14.7552079751468, 5.8992638887185445),
        (15.340195644804215, 5.729678720702473),
        (15.967325857756403, 5.5680089606343035),
        (16.639634565096838, 5.4139691265071574),
        (17.360376427999583, 5.267275157830293),
        (18.133040573605356, 5.1276436467627295),
        (18.96136748596242, 4.994797142412716),
        (19.84936711379173, 4.868447872962715),
        (20.801338282736552, 4.748323780650413),
        (21.821889506071457, 4.634152884016383),
        (22.915961294616096, 4.525667651250209),
        (24.0888500738562, 4.42260820844792),
        (25.3462338240553, 4.3247180816953605),
        (26.694199567481665, 4.231747266306374),
        (28.139272835816183, 4.143458651479127),
        (29.688449260394297, 4.059617624613955),
        (31.349228438210417, 3.9800018310920326),
        (33.12965023763114, 3.9043957815766963),
        (35.03833371957416, 3.8325936007223205),
        (37.08451886257088, 3.7643977928161916),
        (39.2781112937048, 3.699619416790413),
        (41.62973024196904, 3.6380798487463126),
        (44.15075994618665, 3.5796075911973504),
        (46.853404766359866, 3.5240391758181864),
        (49.75074826524419, 3.471220244189398),
        (52.85681654616209, 3.4210043714642135),
        (56.18664615367647, 3.3732521364469497),
        (59.7563568658321, 3.3278319644220073),
        (63.5832297303541, 3.2846190500809405),
        (67.68579072257836, 3.2434954036216683),
        (72.08390043010372, 3.2043498573819633),
        (76.79885019833193, 3.1670766370240844),
        (81.85346520233621, 3.131576362760629),
        (87.272214944034, 3.097755215387489),
        (93.0813317095819, 3.0655243755422448),
        (99.30893756044647, 3.0348001953764374),
        (105.98518047292073, 3.0055036107165805),
        (113.1423802851365, 2.9775601085814087),
        (120.81518515810893, 2.950899474959764),
        (129.0407393082433, 2.925455346788579),
        (137.85886282329886, 2.9011650969116554),
        (147.31224443230616, 2.8779697201905803),
        (157.44664816263983, 2.855813540759905),
        (168.31113488467543, 2.834643960201285),
        (179.95829981653944, 2.8144113508205293),
        (192.44452713870993, 2.7950688471745146),
        (205.83026295106967, 2.776572279785246),
        (220.18030789380046, 2.75887984882185),
        (235.56413084869862, 2.741952092232785),
        (252.05620523955614, 2.7257517438920598),
        (269.7363695596331, 2.710395368890749),
        (288.6902138715529, 2.6961171212126875),
        (309.00949415067134, 2.683075911797728),
        (330.7925764777596, 2.671354202285017),
        (354.1449132313564, 2.6609738159142413),
        (379.1795535850436, 2.6519140131795425),
        (406.01769078096686, 2.6441264895954713),
        (434.7892488289798, 2.637546682728087),
        (465.63351147161575, 2.632100927154303),
        (498.69979645973757, 2.627643248579477),
        (534.1481784030416, 2.6239319305913877),
        (572.1502636947438, 2.62073829349951),
        (612.8900212618898, 2.6178714709514623),
        (656.5646731629579, 2.6151808026617407),
        (703.3856493441666, 2.6125514844333186),
        (753.5796111764666, 2.609908389207669),
        (807.3895487282106, 2.607278830833481),
        (865.0759570853838, 2.604743723637744),
        (926.9180974140314, 2.602381207434983),
        (993.2153488696681, 2.6002548558847502),
        (1064.2886578983293, 2.598410228106285),
        (1140.4820919453505, 2.5968319603904577),
        (1222.164505093393, 2.5954465005839165),
        (1309.731323693141, 2.594176381730235),
        (1403.6064606309299, 2.592953399045985),
        (1504.2443675002992, 2.59173874308368),
        (1612.1322346121142, 2.590556484600599),
        (1727.7923494935376, 2.589449556866049),
        (1851.784625293369, 2.5884583358136477),
        (1984.7093113338658, 2.5875939822308998),
        (2127.2098989308656, 2.586820971087601),
        (2279.976236549327, 2.586094750736087),
        (2443.7478693748517, 2.585382288166672),
        (2619.3176194681237, 2.58469363263235),
        (2807.5354238338828, 2.584056999530477),
        (3009.312448984549, 2.5834932429184643),
        (3225.625501917273, 2.582987138392865),
        (3457.5217588580163, 2.5825087594731695),
        (3706.1238346645605, 2.582042367762344),
        (3972.6352174296285, 2.5816025906563853),
        (4258.346094593119, 2.581207908209019),
        (4564.639598767712, 2.5808516672986284),
        (4892.998503514156, 2.5805126359599773),
        (5245.012401480566, 2.5801858457507056),
        (5622.385399655185, 2.579885597956549),
        (6026.944368985702, 2.579615487379513),
        (6460.647788301444, 2.5793606096053634),
        (6925.5952253523055, 2.5791160482814948),
        (7424.037500862235, 2.5788925008765036),
        (7958.387584801565, 2.578688577437226),
        (8531.232277627576, 2.578493378388284),
        (9145.34473304206, 2.5783109574121283),
        (9803.697882889159, 2.578145359938588),
        (10509.478829183576, 2.5779881781547713),
    ],
};
