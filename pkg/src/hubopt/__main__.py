from hubopt.cli import main

main()
