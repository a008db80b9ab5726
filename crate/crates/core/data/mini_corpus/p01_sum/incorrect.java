import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        // values are read as int
        int a = sc.nextInt();
        int b = sc.nextInt();
        int total = a + b;
        System.out.println(total);
    }
}
